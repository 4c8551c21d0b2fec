#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crnerg/network.hpp"
#include "crnerg/poly.hpp"

namespace crnerg {

/// Closed bounds per variable name.
using Box = std::map<std::string, Interval>;

/// p - delta = sum_k c_k prod_i (x_i - lo_i)^a_ki (hi_i - x_i)^b_ki with c_k >= 0.
struct HandelmanCertificate {
    struct Product {
        std::vector<int> a;
        std::vector<int> b;
        double coeff = 0.0;
    };

    int degree = 0;
    double delta = 0.0;
    std::vector<std::string> variables;
    std::vector<Interval> bounds;
    std::vector<Product> products;

    /// delta + sum of products, over `variables`.
    MultiPoly reconstruct() const;
};

enum class PositivityStatus { Certified, Counterexample, Inconclusive };

const char* to_string(PositivityStatus s);

struct PositivityVerdict {
    PositivityStatus status = PositivityStatus::Inconclusive;
    /// "constant", "handelman" or "coefficients" when Certified.
    std::string method;
    std::optional<HandelmanCertificate> certificate;
    /// Counterexample point and the value of p there (<= 0).
    Assignment point;
    double value = 0.0;
    /// Highest Handelman degree tried.
    int max_degree = 0;
};

struct PositivityOptions {
    /// Handelman degree; -1 selects max(deg p, 2).
    int max_degree = -1;
    int multistart = 512;
    std::uint64_t seed = 1;
    bool parallel = true;
};

/// Result of a local minimization run.
struct LocalMin {
    std::vector<double> point;
    double value = 0.0;
};

/// Minimum of p over the box found by projected gradient descent from
/// `starts` Halton points. Variables follow p.variables(); every variable of p
/// must appear in `box`. Serial reference kernel.
LocalMin minimize_on_box_serial(const MultiPoly& p, const Box& box, int starts);
/// Same computation with the starts distributed over OpenMP threads.
/// Returns exactly the serial result (the best start is chosen by index).
LocalMin minimize_on_box_parallel(const MultiPoly& p, const Box& box, int starts);

/// Positivity of p on the box: counterexample search first, then Handelman
/// LPs of increasing degree. Degenerate bounds are substituted before the LP.
PositivityVerdict certify_positive_on_box(const MultiPoly& p, const Box& box, const PositivityOptions& opts = {});

/// Positivity of p on the open positive orthant: coefficient signs, then a
/// counterexample search over logarithmic grids and random points.
PositivityVerdict positive_on_orthant(const MultiPoly& p, const PositivityOptions& opts = {});

/// Variables with positive degree in p, in p's order.
std::vector<std::string> used_variables(const MultiPoly& p);

/// i-th point (0-based) of the Halton sequence in [0,1)^dim.
std::vector<double> halton_point(std::uint64_t index, std::size_t dim);

/// SplitMix64 step, used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace crnerg
