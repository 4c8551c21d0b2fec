#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace crnerg {

using Exponent = std::vector<int>;
using Assignment = std::map<std::string, double>;

/// Sparse multivariate polynomial with real coefficients over named variables.
///
/// Every exponent vector has one entry per variable and no stored coefficient
/// is zero. Binary operations on polynomials with different variable lists
/// first merge the lists (left operand's order, then unseen names of the right).
class MultiPoly {
public:
    MultiPoly() = default;
    explicit MultiPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    static MultiPoly constant(double c, std::vector<std::string> vars = {});
    static MultiPoly variable(const std::string& name, std::vector<std::string> vars = {});

    const std::vector<std::string>& variables() const { return vars_; }
    const std::map<Exponent, double>& terms() const { return terms_; }
    std::size_t num_terms() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    double constant_term() const;
    int total_degree() const;
    int degree_in(std::size_t var) const;

    /// Coefficient of a monomial; zero if absent.
    double coeff(const Exponent& e) const;
    void add_term(const Exponent& e, double c);

    /// Same polynomial re-expressed over `vars` (must contain every variable in use).
    MultiPoly with_variables(const std::vector<std::string>& vars) const;

    double eval(std::span<const double> point) const;
    /// Missing variables that actually occur raise MissingParameter.
    double eval(const Assignment& a) const;
    /// Nested Horner evaluation, independent of eval(); used as a cross-check.
    double eval_horner(std::span<const double> point) const;

    /// Partial evaluation: fixes the named variables, keeps the variable list.
    MultiPoly substitute(const Assignment& a) const;
    MultiPoly derivative(std::size_t var) const;

    /// Drops coefficients with |c| <= tol * max|c|.
    MultiPoly pruned(double tol) const;

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly& operator*=(double s);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(MultiPoly a, double s) { return a *= s; }
    friend MultiPoly operator*(double s, MultiPoly a) { return a *= s; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);

    /// Structural equality (same variables, same terms).
    bool operator==(const MultiPoly& o) const = default;

    /// Max |coefficient difference| after aligning variables.
    static double max_coeff_diff(const MultiPoly& a, const MultiPoly& b);

    std::string to_string() const;

private:
    void align_with(const MultiPoly& o);

    std::vector<std::string> vars_;
    std::map<Exponent, double> terms_;
};

/// Union of variable lists preserving first-seen order.
std::vector<std::string> merge_variables(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// All exponent vectors in `n` variables with total degree <= `max_degree`,
/// in graded order.
std::vector<Exponent> monomials_up_to(std::size_t n, int max_degree);

}  // namespace crnerg
