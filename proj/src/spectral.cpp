#include "crnerg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Eigenvalues>

#include "crnerg/error.hpp"
#include "crnerg/exact.hpp"
#include "crnerg/linprog.hpp"

namespace crnerg {

bool is_metzler(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) throw ContractViolation("is_metzler needs a square matrix");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) < -tol) return false;
    return true;
}

namespace {

/// For Metzler M: true iff M - tI is Hurwitz.
bool shifted_is_hurwitz(const Eigen::MatrixXd& m, double t) {
    const auto n = m.rows();
    Eigen::MatrixXd shifted = m - t * Eigen::MatrixXd::Identity(n, n);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
    const Eigen::VectorXd x = lu.solve(-Eigen::VectorXd::Ones(n));
    for (Eigen::Index i = 0; i < n; ++i)
        if (!std::isfinite(x(i)) || !(x(i) > 0.0)) return false;
    // Reject solutions the factorization could not reproduce.
    const double resid = (shifted * x + Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();
    return resid <= 1e-8 * (1.0 + shifted.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff());
}

}  // namespace

double pf_eigenvalue(const Eigen::MatrixXd& m) {
    if (!is_metzler(m)) throw ContractViolation("pf_eigenvalue requires a Metzler matrix");
    const auto n = m.rows();
    if (n == 0) return -std::numeric_limits<double>::infinity();
    double lo = m.diagonal().maxCoeff();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) s += (i == j) ? m(i, j) : std::max(0.0, m(i, j));
        hi = std::max(hi, s);
    }
    if (hi <= lo) return lo;
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (shifted_is_hurwitz(m, mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double max_real_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return -std::numeric_limits<double>::infinity();
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    return es.eigenvalues().real().maxCoeff();
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
    }
    return "?";
}

std::optional<Eigen::VectorXd> lp_hurwitz_certificate(const Eigen::MatrixXd& m, double epsilon) {
    const auto n = static_cast<std::size_t>(m.rows());
    FeasibilityProblem p(n);
    p.slack = epsilon;
    for (std::size_t i = 0; i < n; ++i) {
        p.lower[i] = 1.0;
        p.objective[i] = 1.0;
    }
    // Column j of v^T M < 0.
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i) row[i] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        p.add_row(std::move(row), RowSense::Less, 0.0);
    }
    const auto sol = solve_strict_feasibility(p);
    if (!sol) return std::nullopt;
    return Eigen::Map<const Eigen::VectorXd>(sol->data(), static_cast<Eigen::Index>(n));
}

HurwitzResult is_hurwitz_metzler(const Eigen::MatrixXd& m, const StabilityTolerances& tol) {
    HurwitzResult r;
    if (m.rows() == 0) {
        r.verdict = Stability::Stable;
        r.lambda_pf = -std::numeric_limits<double>::infinity();
        r.certificate = Eigen::VectorXd();
        return r;
    }
    r.lambda_pf = pf_eigenvalue(m);
    auto cert = lp_hurwitz_certificate(m, tol.epsilon);
    if (r.lambda_pf < -tol.marginal) {
        if (!cert)
            throw NumericalInconsistency("eigenvalue says stable (lambda_PF = " + std::to_string(r.lambda_pf) +
                                         ") but no LP certificate was found");
        r.verdict = Stability::Stable;
        r.certificate = std::move(cert);
    } else if (r.lambda_pf > tol.marginal) {
        if (cert)
            throw NumericalInconsistency("LP certificate found for a matrix with lambda_PF = " +
                                         std::to_string(r.lambda_pf));
        r.verdict = Stability::Unstable;
    } else {
        r.verdict = Stability::Marginal;
    }
    return r;
}

std::optional<std::vector<std::size_t>> find_cycle(const std::vector<std::vector<bool>>& support) {
    const std::size_t n = support.size();
    std::vector<int> color(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<std::size_t> parent(n, SIZE_MAX);
    std::optional<std::vector<std::size_t>> found;

    std::function<bool(std::size_t)> dfs = [&](std::size_t u) -> bool {
        color[u] = 1;
        for (std::size_t v = 0; v < n; ++v) {
            if (!support[u][v]) continue;
            if (color[v] == 1) {
                std::vector<std::size_t> cyc{v};
                for (std::size_t w = u; w != v; w = parent[w]) cyc.push_back(w);
                std::reverse(cyc.begin() + 1, cyc.end());
                found = std::move(cyc);
                return true;
            }
            if (color[v] == 0) {
                parent[v] = u;
                if (dfs(v)) return true;
            }
        }
        color[u] = 2;
        return false;
    };
    for (std::size_t s = 0; s < n; ++s)
        if (color[s] == 0 && dfs(s)) break;
    return found;
}

RadiusResult spectral_radius_nonneg(const Eigen::MatrixXd& m, double support_tol) {
    if (m.rows() != m.cols()) throw ContractViolation("spectral_radius_nonneg needs a square matrix");
    const auto n = static_cast<std::size_t>(m.rows());
    std::vector<std::vector<bool>> support(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double x = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (x < -1e-12) throw ContractViolation("spectral_radius_nonneg: negative entry");
            support[i][j] = x > support_tol;
        }
    RadiusResult r;
    auto cyc = find_cycle(support);
    if (!cyc) return r;
    r.nilpotent = false;
    r.cycle = std::move(*cyc);
    Eigen::MatrixXd clipped = m.unaryExpr([support_tol](double x) { return x > support_tol ? x : 0.0; });
    r.radius = std::max(0.0, pf_eigenvalue(clipped));
    return r;
}

IntMatrix left_nullspace_basis(const IntMatrix& sb) {
    const auto d = sb.rows();
    if (sb.cols() == 0) return IntMatrix::Identity(d, d);
    const auto basis = nullspace(RationalMatrix::from_int(sb).transpose());
    IntMatrix out(static_cast<Eigen::Index>(basis.size()), d);
    using boost::multiprecision::cpp_int;
    for (std::size_t r = 0; r < basis.size(); ++r) {
        cpp_int lcm = 1;
        for (const auto& x : basis[r]) lcm = boost::multiprecision::lcm(lcm, cpp_int(boost::multiprecision::denominator(x)));
        std::vector<cpp_int> ints;
        cpp_int g = 0;
        for (const auto& x : basis[r]) {
            cpp_int v = boost::multiprecision::numerator(x) * (lcm / boost::multiprecision::denominator(x));
            g = boost::multiprecision::gcd(g, v);
            ints.push_back(v);
        }
        if (g == 0) g = 1;
        bool all_nonpos = true;
        for (auto& v : ints) {
            v /= g;
            if (v > 0) all_nonpos = false;
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto v = ints[static_cast<std::size_t>(j)].convert_to<long long>();
            out(static_cast<Eigen::Index>(r), j) = static_cast<int>(all_nonpos ? -v : v);
        }
    }
    return out;
}

}  // namespace crnerg
