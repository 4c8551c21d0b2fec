#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace crnerg {

enum class RowSense { Less, LessEqual, Equal, GreaterEqual, Greater };

struct LinearRow {
    std::vector<double> coeffs;
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
};

/// A linear program: minimize objective . x over the rows, with optional
/// per-variable lower bounds (no bound = free variable). Strict rows are not
/// allowed here; see FeasibilityProblem.
struct LinearProgram {
    std::size_t dim = 0;
    std::vector<double> objective;
    std::vector<LinearRow> rows;
    std::vector<std::optional<double>> lower;

    explicit LinearProgram(std::size_t n = 0) : dim(n), objective(n, 0.0), lower(n) {}
    void add_row(std::vector<double> coeffs, RowSense sense, double rhs) {
        rows.push_back({std::move(coeffs), sense, rhs});
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

/// Dense two-phase primal simplex with Bland's anti-cycling rule.
LpResult solve_lp(const LinearProgram& lp);

/// Linear constraints that may be strict. Strict rows a.x < b are encoded as
/// a.x <= b - slack; the solver then minimizes `objective` (zero by default)
/// so that bounded encodings return a canonical point.
struct FeasibilityProblem {
    std::size_t dim = 0;
    std::vector<LinearRow> rows;
    std::vector<std::optional<double>> lower;
    std::vector<double> objective;
    double slack = 1e-7;

    explicit FeasibilityProblem(std::size_t n = 0) : dim(n), lower(n), objective(n, 0.0) {}
    void add_row(std::vector<double> coeffs, RowSense sense, double rhs) {
        rows.push_back({std::move(coeffs), sense, rhs});
    }

    /// Largest violation of any row or bound at x; strict rows must clear
    /// the slack. Nonpositive means x satisfies the problem as stated.
    double max_violation(const std::vector<double>& x) const;
};

/// A point satisfying every row (strict ones with margin >= slack, up to
/// rounding), or nullopt when infeasible. An unbounded relaxation means the
/// encoding is wrong and raises NumericalInconsistency.
std::optional<std::vector<double>> solve_strict_feasibility(const FeasibilityProblem& p);

}  // namespace crnerg
