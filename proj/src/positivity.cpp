#include "crnerg/positivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "crnerg/error.hpp"
#include "crnerg/linprog.hpp"

namespace crnerg {

const char* to_string(PositivityStatus s) {
    switch (s) {
        case PositivityStatus::Certified: return "certified";
        case PositivityStatus::Counterexample: return "counterexample";
        case PositivityStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<double> halton_point(std::uint64_t index, std::size_t dim) {
    static constexpr std::array<std::uint64_t, 24> primes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                                             41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        if (k >= primes.size()) {
            // Beyond the table fall back to a hashed coordinate.
            x[k] = static_cast<double>(splitmix64(index * 1315423911ULL + k) >> 11) * 0x1.0p-53;
            continue;
        }
        const std::uint64_t b = primes[k];
        double f = 1.0, r = 0.0;
        for (std::uint64_t i = index; i > 0; i /= b) {
            f /= static_cast<double>(b);
            r += f * static_cast<double>(i % b);
        }
        x[k] = r;
    }
    return x;
}

std::vector<std::string> used_variables(const MultiPoly& p) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < p.variables().size(); ++i)
        if (p.degree_in(i) > 0) out.push_back(p.variables()[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Handelman certificate reconstruction
// ---------------------------------------------------------------------------

MultiPoly HandelmanCertificate::reconstruct() const {
    MultiPoly sum = MultiPoly::constant(delta, variables);
    for (const auto& prod : products) {
        MultiPoly term = MultiPoly::constant(prod.coeff, variables);
        for (std::size_t i = 0; i < variables.size(); ++i) {
            const MultiPoly x = MultiPoly::variable(variables[i], variables);
            const MultiPoly lo_factor = x - MultiPoly::constant(bounds[i].lo, variables);
            const MultiPoly hi_factor = MultiPoly::constant(bounds[i].hi, variables) - x;
            for (int k = 0; k < prod.a[i]; ++k) term = term * lo_factor;
            for (int k = 0; k < prod.b[i]; ++k) term = term * hi_factor;
        }
        sum += term;
    }
    return sum;
}

namespace {

struct BoxFrame {
    std::vector<double> lo;
    std::vector<double> width;
};

/// Bounds for every variable of p, in p's order. Unused variables sit at the
/// box midpoint (or 0 when absent from the box).
BoxFrame frame_for(const MultiPoly& p, const Box& box) {
    BoxFrame f;
    for (std::size_t i = 0; i < p.variables().size(); ++i) {
        const auto& name = p.variables()[i];
        const auto it = box.find(name);
        if (it == box.end()) {
            if (p.degree_in(i) > 0) throw MissingParameter("no bounds for variable '" + name + "'");
            f.lo.push_back(0.0);
            f.width.push_back(0.0);
            continue;
        }
        const auto [lo, hi] = it->second;
        if (!std::isfinite(lo) || !std::isfinite(hi)) throw UnboundedParameter("unbounded box for '" + name + "'");
        if (lo > hi) throw ContractViolation("empty interval for '" + name + "'");
        if (p.degree_in(i) == 0) {
            f.lo.push_back(0.5 * (lo + hi));
            f.width.push_back(0.0);
        } else {
            f.lo.push_back(lo);
            f.width.push_back(hi - lo);
        }
    }
    return f;
}

struct Gradient {
    std::vector<MultiPoly> parts;
    explicit Gradient(const MultiPoly& p) {
        for (std::size_t i = 0; i < p.variables().size(); ++i) parts.push_back(p.derivative(i));
    }
};

/// Projected gradient descent in normalized coordinates t in [0,1]^n.
LocalMin descend(const MultiPoly& p, const Gradient& grad, const BoxFrame& f, std::vector<double> t) {
    const std::size_t n = t.size();
    std::vector<double> x(n);
    auto to_x = [&](const std::vector<double>& tt) {
        for (std::size_t i = 0; i < n; ++i) x[i] = f.lo[i] + f.width[i] * tt[i];
        return p.eval(x);
    };
    double val = to_x(t);
    double step = 1.0;
    std::vector<double> g(n), trial(n);
    for (int it = 0; it < 200 && step > 1e-12; ++it) {
        to_x(t);
        double gnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = f.width[i] > 0.0 ? grad.parts[i].eval(x) * f.width[i] : 0.0;
            gnorm = std::max(gnorm, std::abs(g[i]));
        }
        if (gnorm == 0.0) break;
        bool moved = false;
        while (step > 1e-12) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = std::clamp(t[i] - step * g[i] / gnorm, 0.0, 1.0);
            const double tv = to_x(trial);
            if (tv < val) {
                t = trial;
                val = tv;
                step = std::min(1.0, step * 2.0);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    LocalMin r;
    r.point.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.point[i] = f.lo[i] + f.width[i] * t[i];
    r.value = p.eval(r.point);
    return r;
}

LocalMin run_start(const MultiPoly& p, const Gradient& grad, const BoxFrame& f, int s) {
    return descend(p, grad, f, halton_point(static_cast<std::uint64_t>(s) + 1, p.variables().size()));
}

/// First strictly smallest value wins, so the choice does not depend on scheduling.
LocalMin pick_best(std::vector<LocalMin>& runs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (runs[i].value < runs[best].value) best = i;
    return std::move(runs[best]);
}

}  // namespace

LocalMin minimize_on_box_serial(const MultiPoly& p, const Box& box, int starts) {
    const BoxFrame f = frame_for(p, box);
    const Gradient grad(p);
    std::vector<LocalMin> runs(static_cast<std::size_t>(std::max(starts, 1)));
    for (int s = 0; s < static_cast<int>(runs.size()); ++s) runs[static_cast<std::size_t>(s)] = run_start(p, grad, f, s);
    return pick_best(runs);
}

LocalMin minimize_on_box_parallel(const MultiPoly& p, const Box& box, int starts) {
    const BoxFrame f = frame_for(p, box);
    const Gradient grad(p);
    std::vector<LocalMin> runs(static_cast<std::size_t>(std::max(starts, 1)));
    const int n = static_cast<int>(runs.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (int s = 0; s < n; ++s) runs[static_cast<std::size_t>(s)] = run_start(p, grad, f, s);
    return pick_best(runs);
}

namespace {

/// q(t) = p(lo + width * t) over the same variable list.
MultiPoly to_unit_box(const MultiPoly& p, const std::vector<double>& lo, const std::vector<double>& width) {
    const auto& vars = p.variables();
    MultiPoly out(vars);
    for (const auto& [e, c] : p.terms()) {
        // Expand prod_i (lo_i + w_i t_i)^e_i term by term.
        std::map<Exponent, double> acc{{Exponent(vars.size(), 0), c}};
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (e[i] == 0) continue;
            std::map<Exponent, double> next;
            double binom = 1.0;
            for (int k = 0; k <= e[i]; ++k) {
                const double factor = binom * std::pow(lo[i], e[i] - k) * std::pow(width[i], k);
                if (factor != 0.0)
                    for (const auto& [ae, ac] : acc) {
                        Exponent ne = ae;
                        ne[i] += k;
                        next[ne] += ac * factor;
                    }
                binom = binom * (e[i] - k) / (k + 1);
            }
            acc = std::move(next);
        }
        for (const auto& [ae, ac] : acc) out.add_term(ae, ac);
    }
    return out;
}

/// Coefficients of prod_i t_i^a_i (1 - t_i)^b_i.
std::map<Exponent, double> unit_product(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    std::map<Exponent, double> acc{{Exponent(n, 0), 1.0}};
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0 && b[i] == 0) continue;
        std::map<Exponent, double> next;
        double binom = 1.0;
        for (int k = 0; k <= b[i]; ++k) {
            const double factor = (k % 2 == 0 ? 1.0 : -1.0) * binom;
            for (const auto& [ae, ac] : acc) {
                Exponent ne = ae;
                ne[i] += a[i] + k;
                next[ne] += ac * factor;
            }
            binom = binom * (b[i] - k) / (k + 1);
        }
        acc = std::move(next);
    }
    return acc;
}


/// Handelman LP at one degree. `q` is over `vars` (all used), already mapped to [0,1]^n.
std::optional<HandelmanCertificate> handelman_at_degree(const MultiPoly& q, int degree,
                                                        const std::vector<std::string>& vars,
                                                        const std::vector<Interval>& bounds,
                                                        const std::vector<double>& width) {
    const std::size_t n = vars.size();
    const int row_degree = std::max(degree, q.total_degree());
    const auto monos = monomials_up_to(n, row_degree);
    std::map<Exponent, std::size_t> row_of;
    for (std::size_t r = 0; r < monos.size(); ++r) row_of[monos[r]] = r;

    // Products: (a, b) split of every exponent of length 2n with total degree <= degree.
    const auto splits = monomials_up_to(2 * n, degree);
    const std::size_t ncols = splits.size() + 1;  // last column is delta
    Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(monos.size()), static_cast<Eigen::Index>(ncols));
    for (std::size_t k = 0; k < splits.size(); ++k) {
        const std::vector<int> a(splits[k].begin(), splits[k].begin() + static_cast<std::ptrdiff_t>(n));
        const std::vector<int> b(splits[k].begin() + static_cast<std::ptrdiff_t>(n), splits[k].end());
        for (const auto& [e, c] : unit_product(a, b))
            eq(static_cast<Eigen::Index>(row_of.at(e)), static_cast<Eigen::Index>(k)) = c;
    }
    eq(static_cast<Eigen::Index>(row_of.at(Exponent(n, 0))), static_cast<Eigen::Index>(ncols - 1)) = 1.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(monos.size()));
    for (const auto& [e, c] : q.terms()) rhs(static_cast<Eigen::Index>(row_of.at(e))) = c;

    LinearProgram lp(ncols);
    for (std::size_t k = 0; k < ncols; ++k) lp.lower[k] = 0.0;
    lp.objective[ncols - 1] = -1.0;
    for (Eigen::Index r = 0; r < eq.rows(); ++r) {
        std::vector<double> row(ncols);
        for (std::size_t k = 0; k < ncols; ++k) row[k] = eq(r, static_cast<Eigen::Index>(k));
        lp.add_row(std::move(row), RowSense::Equal, rhs(r));
    }
    const auto res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) return std::nullopt;

    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    std::vector<double> sol = res.x;
    // Refine the active columns by least squares to shed simplex rounding.
    std::vector<Eigen::Index> active;
    for (std::size_t k = 0; k < ncols; ++k)
        if (sol[k] > 1e-12 * scale) active.push_back(static_cast<Eigen::Index>(k));
    if (!active.empty()) {
        Eigen::MatrixXd sub(eq.rows(), static_cast<Eigen::Index>(active.size()));
        for (std::size_t j = 0; j < active.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = eq.col(active[j]);
        const Eigen::VectorXd refined = sub.colPivHouseholderQr().solve(rhs);
        if ((sub * refined - rhs).cwiseAbs().maxCoeff() <= 1e-13 * scale && refined.minCoeff() >= 0.0) {
            std::fill(sol.begin(), sol.end(), 0.0);
            for (std::size_t j = 0; j < active.size(); ++j)
                sol[static_cast<std::size_t>(active[j])] = refined(static_cast<Eigen::Index>(j));
        }
    }
    const double delta = sol[ncols - 1];
    if (!(delta > 1e-9 * scale)) return std::nullopt;

    HandelmanCertificate cert;
    cert.degree = degree;
    cert.delta = delta;
    cert.variables = vars;
    cert.bounds = bounds;
    for (std::size_t k = 0; k < splits.size(); ++k) {
        if (sol[k] <= 0.0) continue;
        HandelmanCertificate::Product prod;
        prod.a.assign(splits[k].begin(), splits[k].begin() + static_cast<std::ptrdiff_t>(n));
        prod.b.assign(splits[k].begin() + static_cast<std::ptrdiff_t>(n), splits[k].end());
        // (x - lo)^a (hi - x)^b = w^(a+b) t^a (1 - t)^b
        double c = sol[k];
        for (std::size_t i = 0; i < n; ++i) c /= std::pow(width[i], prod.a[i] + prod.b[i]);
        prod.coeff = c;
        cert.products.push_back(std::move(prod));
    }
    return cert;
}

Assignment to_assignment(const std::vector<std::string>& vars, const std::vector<double>& x) {
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = x[i];
    return a;
}

}  // namespace

PositivityVerdict certify_positive_on_box(const MultiPoly& p, const Box& box, const PositivityOptions& opts) {
    PositivityVerdict v;
    const BoxFrame frame = frame_for(p, box);
    const auto& vars = p.variables();

    // Substitute degenerate and unused variables.
    Assignment fixed;
    std::vector<std::string> live;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (frame.width[i] > 0.0)
            live.push_back(vars[i]);
        else
            fixed[vars[i]] = frame.lo[i];
    }
    const MultiPoly q = p.substitute(fixed).with_variables(vars);
    MultiPoly ql(live);
    for (const auto& [e, c] : q.terms()) {
        Exponent le;
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (frame.width[i] > 0.0) le.push_back(e[i]);
        ql.add_term(le, c);
    }

    Assignment mid = fixed;
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (frame.width[i] > 0.0) mid[vars[i]] = frame.lo[i] + 0.5 * frame.width[i];

    if (ql.total_degree() <= 0) {
        const double c = ql.constant_term();
        if (c > 0.0) {
            v.status = PositivityStatus::Certified;
            v.method = "constant";
            HandelmanCertificate cert;
            cert.delta = c;
            cert.variables = live;
            for (const auto& name : live) cert.bounds.push_back(box.at(name));
            v.certificate = std::move(cert);
        } else {
            v.status = PositivityStatus::Counterexample;
            v.point = mid;
            v.value = c;
        }
        return v;
    }

    Box live_box;
    for (const auto& name : live) live_box[name] = box.at(name);
    const LocalMin best = opts.parallel ? minimize_on_box_parallel(ql, live_box, opts.multistart)
                                        : minimize_on_box_serial(ql, live_box, opts.multistart);
    if (best.value <= 0.0) {
        v.status = PositivityStatus::Counterexample;
        v.point = fixed;
        for (std::size_t i = 0; i < live.size(); ++i) v.point[live[i]] = best.point[i];
        v.value = p.eval(v.point);
        return v;
    }

    std::vector<double> lo, width;
    std::vector<Interval> bounds;
    for (const auto& name : live) {
        const auto iv = box.at(name);
        lo.push_back(iv.lo);
        width.push_back(iv.hi - iv.lo);
        bounds.push_back(iv);
    }
    const MultiPoly unit = to_unit_box(ql, lo, width);
    const int deg = ql.total_degree();
    const int top = opts.max_degree >= 0 ? std::max(opts.max_degree, deg) : std::max(deg, 2);
    const double tol = 1e-8 * std::max(1.0, [&] {
        double m = 0.0;
        for (const auto& [e, c] : ql.terms()) m = std::max(m, std::abs(c));
        return m;
    }());
    for (int d = deg; d <= top; ++d) {
        v.max_degree = d;
        auto cert = handelman_at_degree(unit, d, live, bounds, width);
        if (!cert) continue;
        if (MultiPoly::max_coeff_diff(cert->reconstruct(), ql) > tol) continue;
        v.status = PositivityStatus::Certified;
        v.method = "handelman";
        v.certificate = std::move(cert);
        return v;
    }
    v.status = PositivityStatus::Inconclusive;
    return v;
}

PositivityVerdict positive_on_orthant(const MultiPoly& p, const PositivityOptions& opts) {
    PositivityVerdict v;
    const auto live = used_variables(p);
    const auto& vars = p.variables();

    bool any_pos = false, any_neg = false;
    for (const auto& [e, c] : p.terms()) {
        if (c > 0.0) any_pos = true;
        if (c < 0.0) any_neg = true;
    }
    if (any_pos && !any_neg) {
        v.status = PositivityStatus::Certified;
        v.method = live.empty() ? "constant" : "coefficients";
        return v;
    }

    std::vector<double> x(vars.size(), 1.0);
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    auto consider = [&] {
        const double val = p.eval(x);
        if (val < best_val) {
            best_val = val;
            best_x = x;
        }
    };
    std::vector<std::size_t> live_idx;
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (p.degree_in(i) > 0) live_idx.push_back(i);

    consider();
    if (!live_idx.empty() && live_idx.size() <= 6) {
        // Logarithmic grid 1e-3 .. 1e3 in each live variable.
        std::vector<int> digit(live_idx.size(), 0);
        while (true) {
            for (std::size_t k = 0; k < live_idx.size(); ++k) x[live_idx[k]] = std::pow(10.0, digit[k] - 3);
            consider();
            std::size_t k = 0;
            while (k < digit.size() && ++digit[k] == 7) digit[k++] = 0;
            if (k == digit.size()) break;
        }
    }
    std::mt19937_64 rng(splitmix64(opts.seed));
    std::uniform_real_distribution<double> expo(-3.0, 3.0);
    for (int s = 0; s < opts.multistart; ++s) {
        for (const auto i : live_idx) x[i] = std::pow(10.0, expo(rng));
        consider();
    }
    if (best_val <= 0.0) {
        v.status = PositivityStatus::Counterexample;
        v.point = to_assignment(vars, best_x);
        v.value = best_val;
        return v;
    }
    v.status = PositivityStatus::Inconclusive;
    return v;
}

}  // namespace crnerg
