#include "crnerg/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crnerg/error.hpp"

namespace crnerg {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr std::size_t kMaxPivots = 200000;
constexpr std::size_t kDegenerateSwitch = 50;

/// Dense simplex tableau over min c.y, A y = b, y >= 0 with b >= 0.
class Tableau {
public:
    Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), t_((m + 1) * (n + 1), 0.0), basis_(m, 0) {}

    double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return t_[i * (n_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, n_); }
    double& cost(std::size_t j) { return at(m_, j); }
    std::size_t& basis(std::size_t i) { return basis_[i]; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void pivot(std::size_t r, std::size_t c) {
        const double p = at(r, c);
        for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
        at(r, c) = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
            at(i, c) = 0.0;
        }
        basis_[r] = c;
    }

    /// Runs simplex iterations on the current cost row. Columns >= `allowed`
    /// never enter. Returns false if unbounded.
    bool optimize(std::size_t allowed, std::size_t& pivots) {
        std::size_t degenerate = 0;
        while (pivots < kMaxPivots) {
            const bool bland = degenerate > kDegenerateSwitch;
            std::size_t enter = n_;
            double best = -kCostTol;
            for (std::size_t j = 0; j < allowed; ++j) {
                const double cj = at(m_, j);
                if (cj < best) {
                    enter = j;
                    best = cj;
                    if (bland) break;
                }
            }
            if (enter == n_) return true;

            std::size_t leave = m_;
            double ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotTol) continue;
                const double q = at(i, n_) / a;
                if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && leave < m_ && basis_[i] < basis_[leave])) {
                    ratio = q;
                    leave = i;
                }
            }
            if (leave == m_) return false;
            degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
            pivot(leave, enter);
            ++pivots;
        }
        throw NumericalInconsistency("simplex iteration limit reached");
    }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
    const std::size_t nx = lp.dim;
    if (lp.objective.size() != nx || lp.lower.size() != nx) throw ContractViolation("LinearProgram sizes disagree");

    // Column layout: structural columns (split for free variables), then slacks, then artificials.
    std::vector<std::size_t> pos_col(nx), neg_col(nx, SIZE_MAX);
    std::size_t ncols = 0;
    for (std::size_t i = 0; i < nx; ++i) {
        pos_col[i] = ncols++;
        if (!lp.lower[i]) neg_col[i] = ncols++;
    }
    const std::size_t n_struct = ncols;
    std::size_t n_slack = 0;
    for (const auto& r : lp.rows) {
        if (r.sense == RowSense::Less || r.sense == RowSense::Greater)
            throw ContractViolation("strict row in solve_lp; use solve_strict_feasibility");
        if (r.coeffs.size() != nx) throw ContractViolation("row length does not match dimension");
        if (r.sense != RowSense::Equal) ++n_slack;
    }
    const std::size_t m = lp.rows.size();
    const std::size_t n_real = n_struct + n_slack;
    const std::size_t n_total = n_real + m;

    Tableau tab(m, n_total);
    std::size_t slack = n_struct;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& row = lp.rows[i];
        double b = row.rhs;
        double scale = 0.0;
        for (std::size_t k = 0; k < nx; ++k) {
            if (lp.lower[k]) b -= row.coeffs[k] * *lp.lower[k];
            scale = std::max(scale, std::abs(row.coeffs[k]));
        }
        if (scale == 0.0) scale = 1.0;
        for (std::size_t k = 0; k < nx; ++k) {
            tab.at(i, pos_col[k]) = row.coeffs[k] / scale;
            if (neg_col[k] != SIZE_MAX) tab.at(i, neg_col[k]) = -row.coeffs[k] / scale;
        }
        if (row.sense == RowSense::LessEqual) tab.at(i, slack++) = 1.0;
        if (row.sense == RowSense::GreaterEqual) tab.at(i, slack++) = -1.0;
        tab.rhs(i) = b / scale;
        if (tab.rhs(i) < 0.0)
            for (std::size_t j = 0; j <= n_total; ++j) tab.at(i, j) = -tab.at(i, j);
        tab.at(i, n_real + i) = 1.0;
        tab.basis(i) = n_real + i;
    }

    LpResult res;
    // Phase 1: minimize the sum of artificials.
    double bmax = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        bmax = std::max(bmax, tab.rhs(i));
        for (std::size_t j = 0; j <= n_total; ++j)
            if (j < n_real || j == n_total) tab.cost(j) -= tab.at(i, j);
    }
    tab.optimize(n_real, res.pivots);
    if (-tab.cost(n_total) > 1e-9 * bmax) {
        res.status = LpStatus::Infeasible;
        return res;
    }
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis(i) < n_real) continue;
        std::size_t best = n_real;
        double mag = kPivotTol * 100;
        for (std::size_t j = 0; j < n_real; ++j)
            if (std::abs(tab.at(i, j)) > mag) {
                mag = std::abs(tab.at(i, j));
                best = j;
            }
        if (best < n_real) {
            tab.pivot(i, best);
            ++res.pivots;
        }
    }

    // Phase 2: original objective in the structural columns.
    std::vector<double> c(n_total, 0.0);
    for (std::size_t k = 0; k < nx; ++k) {
        c[pos_col[k]] = lp.objective[k];
        if (neg_col[k] != SIZE_MAX) c[neg_col[k]] = -lp.objective[k];
    }
    for (std::size_t j = 0; j <= n_total; ++j) tab.cost(j) = j < n_total ? c[j] : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double cb = c[tab.basis(i)];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= n_total; ++j) tab.cost(j) -= cb * tab.at(i, j);
    }
    if (!tab.optimize(n_real, res.pivots)) {
        res.status = LpStatus::Unbounded;
        return res;
    }

    std::vector<double> y(n_total, 0.0);
    for (std::size_t i = 0; i < m; ++i) y[tab.basis(i)] = std::max(0.0, tab.rhs(i));
    res.x.assign(nx, 0.0);
    for (std::size_t k = 0; k < nx; ++k) {
        double v = y[pos_col[k]];
        if (neg_col[k] != SIZE_MAX) v -= y[neg_col[k]];
        if (lp.lower[k]) v += *lp.lower[k];
        res.x[k] = v;
    }
    res.objective = 0.0;
    for (std::size_t k = 0; k < nx; ++k) res.objective += lp.objective[k] * res.x[k];
    res.status = LpStatus::Optimal;
    return res;
}

double FeasibilityProblem::max_violation(const std::vector<double>& x) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dim; ++i)
        if (lower[i]) worst = std::max(worst, *lower[i] - x[i]);
    for (const auto& r : rows) {
        double ax = 0.0;
        double scale = 1.0;
        for (std::size_t k = 0; k < dim; ++k) {
            ax += r.coeffs[k] * x[k];
            scale = std::max(scale, std::abs(r.coeffs[k] * x[k]));
        }
        const double tol = 1e-10 * scale;
        switch (r.sense) {
            case RowSense::Less: worst = std::max(worst, ax - (r.rhs - slack) - tol); break;
            case RowSense::LessEqual: worst = std::max(worst, ax - r.rhs - tol); break;
            case RowSense::Equal: worst = std::max(worst, std::abs(ax - r.rhs) - tol); break;
            case RowSense::GreaterEqual: worst = std::max(worst, r.rhs - ax - tol); break;
            case RowSense::Greater: worst = std::max(worst, (r.rhs + slack) - ax - tol); break;
        }
    }
    return worst;
}

std::optional<std::vector<double>> solve_strict_feasibility(const FeasibilityProblem& p) {
    LinearProgram lp(p.dim);
    lp.lower = p.lower;
    lp.objective = p.objective;
    for (const auto& r : p.rows) {
        switch (r.sense) {
            case RowSense::Less: lp.add_row(r.coeffs, RowSense::LessEqual, r.rhs - p.slack); break;
            case RowSense::Greater: lp.add_row(r.coeffs, RowSense::GreaterEqual, r.rhs + p.slack); break;
            default: lp.add_row(r.coeffs, r.sense, r.rhs); break;
        }
    }
    const auto res = solve_lp(lp);
    if (res.status == LpStatus::Unbounded)
        throw NumericalInconsistency("feasibility encoding has an unbounded relaxation");
    if (res.status == LpStatus::Infeasible) return std::nullopt;
    // Rounding in the tableau can leave a strict row a hair short of its
    // slack; accept within half of it.
    FeasibilityProblem relaxed = p;
    relaxed.slack = p.slack * 0.5;
    if (relaxed.max_violation(res.x) > 0.0) return std::nullopt;
    return res.x;
}

}  // namespace crnerg
