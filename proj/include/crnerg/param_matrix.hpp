#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crnerg/network.hpp"
#include "crnerg/poly.hpp"

namespace crnerg {

/// One first-order propensity channel: rate * x[reactant], jumping by `stoich`.
struct LinearTerm {
    std::string param;
    std::vector<int> stoich;
    std::size_t reactant = 0;
    UniKind kind = UniKind::Degradation;
    /// Index of the originating reaction in the source network.
    std::size_t reaction = 0;
};

/// The first-order part of a network, A(rho_u) = S_u W(rho_u), in term form.
///
/// Kept separate from ReactionNetwork so that reduced systems (obtained by
/// projecting onto a left null space) can reuse the same machinery.
struct FirstOrderSystem {
    std::vector<std::string> species;
    std::vector<LinearTerm> terms;
    std::map<std::string, RateParam> domain;

    std::size_t dim() const { return species.size(); }
    /// Parameter names in first-use order.
    std::vector<std::string> param_names() const;
    /// Parameters used by terms of the given kind.
    std::vector<std::string> params_of_kind(UniKind k) const;
    std::vector<const LinearTerm*> terms_of_kind(UniKind k) const;
    bool has_kind(UniKind k) const;
};

FirstOrderSystem first_order_system(const ReactionNetwork& net);

/// Matrix of polynomials, affine in the rate parameters for every matrix built here.
class ParamMatrix {
public:
    ParamMatrix() = default;
    ParamMatrix(std::size_t rows, std::size_t cols, std::vector<std::string> vars = {});

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<std::string>& variables() const { return vars_; }

    const MultiPoly& operator()(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }
    /// Adds `coeff * var` (or `coeff` when `var` is empty) to cell (i, j).
    void add(std::size_t i, std::size_t j, double coeff, const std::string& var = {});
    void set(std::size_t i, std::size_t j, MultiPoly p);

    int max_degree() const;
    /// Off-diagonal cells have only nonnegative coefficients: Metzler for all
    /// nonnegative parameter values.
    bool structurally_metzler() const;

    /// Parameter domain for the symbolic variables (bounds for boxes).
    std::map<std::string, RateParam> domain;

private:
    void ensure_variable(const std::string& v);

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::string> vars_;
    std::vector<MultiPoly> cells_;
};

/// Per-term rate choice: a number, or nullopt to keep the term's parameter symbolic.
using TermRate = std::function<std::optional<double>(const LinearTerm&)>;

/// sum over terms of rate * stoich * e_reactant^T.
ParamMatrix assemble_matrix(const FirstOrderSystem& sys, const TermRate& rate);

/// A(rho_u) with every first-order rate symbolic.
ParamMatrix characteristic_matrix(const ReactionNetwork& net);
ParamMatrix characteristic_matrix(const FirstOrderSystem& sys);

/// b0(rho_0) = S_0 w_0(rho_0) as a d x 1 matrix with symbolic zeroth-order rates.
ParamMatrix offset_vector(const ReactionNetwork& net);

/// A+(rho_cv): degradation terms at their lower bounds, catalytic terms at
/// their upper bounds, conversion terms symbolic (or numeric when the
/// parameter is a point). Throws UnboundedParameter for Free parameters.
ParamMatrix upper_bound_matrix(const FirstOrderSystem& sys);
ParamMatrix upper_bound_matrix(const ReactionNetwork& net, const UniClass& cls);

/// Entrywise evaluation. Throws MissingParameter when a used variable is unassigned.
Eigen::MatrixXd eval_matrix(const ParamMatrix& m, const Assignment& a);
Eigen::MatrixXd eval_matrix(const ParamMatrix& m, std::span<const double> point);

/// Exact symbolic determinant (division-free minor expansion).
MultiPoly det_poly(const ParamMatrix& m);

/// Adj(M) with Adj(M) M = det(M) I.
ParamMatrix adjugate(const ParamMatrix& m);

/// v^T = (-1)^(d+1) 1^T Adj(M), so that v^T M = -(-1)^d det(M) 1^T.
std::vector<MultiPoly> adjugate_vector(const ParamMatrix& m);

}  // namespace crnerg
