// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "crnerg/ergodicity.hpp"
#include "crnerg/param_matrix.hpp"
#include "crnerg/spectral.hpp"
#include "crnerg/ssa.hpp"
#include "support.hpp"

using namespace crnerg;
using namespace crnerg::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

/// Structural run on a bundled network, with parse time included.
struct Timed {
    ErgodicityReport rep;
    double secs;
};

Timed structural_timed(const std::string& file) {
    const auto t0 = Clock::now();
    const auto net = load(file);
    auto rep = analyze(net, AnalysisMode::Structural);
    return {std::move(rep), seconds_since(t0)};
}

Outcome c1_sir() {
    const auto [rep, secs] = structural_timed("sir.crn");
    const auto* w = std::get_if<StructuralCertificate>(&rep.certificate);
    const bool ok = rep.verdict == Verdict::Certified && w && w->a_one == mat({{-2, 1}, {1, -2}}) &&
                    std::abs(w->lambda_pf + 1.0) <= 1e-9 && secs < 1.0;
    return {ok, std::string("verdict ") + to_string(rep.verdict) + ", lambda_PF " + (w ? fmt(w->lambda_pf) : "-") + ", " +
                    fmt(secs * 1e3) + " ms"};
}

Outcome c2_circadian() {
    const auto [rep, secs] = structural_timed("circadian.crn");
    const auto* w = std::get_if<StructuralCertificate>(&rep.certificate);
    const bool ok = rep.verdict == Verdict::Certified && w && w->a_one == -Eigen::MatrixXd::Identity(4, 4) &&
                    w->coupling.size() > 0 && (w->coupling.array() == 0.0).all() && w->nilpotent && secs < 1.0;
    return {ok, std::string("verdict ") + to_string(rep.verdict) + ", A_1 = -I4: " +
                    std::string(w && w->a_one == -Eigen::MatrixXd::Identity(4, 4) ? "yes" : "no") + ", coupling zero: " +
                    std::string(w && (w->coupling.array() == 0.0).all() ? "yes" : "no") + ", " + fmt(secs * 1e3) + " ms"};
}

Outcome c3_toy1() {
    const auto rep = analyze(load("toy_case1.crn"), AnalysisMode::Structural);
    const auto* w = std::get_if<StructuralCertificate>(&rep.certificate);
    const double det = w ? -w->a_one.determinant() : NAN;
    const bool ok = rep.verdict == Verdict::Certified && w &&
                    w->a_one == mat({{-2, 0, 1}, {1, -2, 0}, {0, 1, -1}}) && std::abs(det - 3.0) <= 1e-12;
    return {ok, std::string("verdict ") + to_string(rep.verdict) + ", (-1)^3 det A_1 = " + fmt(det)};
}

Outcome c4_toy2() {
    const auto rep = analyze(load("toy_case2.crn"), AnalysisMode::Structural);
    const auto* w = std::get_if<StructuralCertificate>(&rep.certificate);
    const bool ok = rep.verdict == Verdict::Refuted && w && !w->nilpotent && w->cycle.size() == 2 &&
                    std::abs(w->radius - 1.0) <= 1e-12;
    return {ok, std::string("verdict ") + to_string(rep.verdict) + ", radius " + (w ? fmt(w->radius) : "-") + ", cycle length " +
                    (w ? std::to_string(w->cycle.size()) : "-")};
}

Outcome c5_robust() {
    const auto net = load("toy_robust.crn");
    const auto rep = analyze(net, AnalysisMode::RobustParametric);
    const auto det = det_poly(upper_bound_matrix(first_order_system(net)));
    MultiPoly expect({"k1"});
    expect.add_term({1}, -3.0);
    const double diff = MultiPoly::max_coeff_diff(det, expect);

    const auto bad_net = load("toy_robust_unstable.crn");
    const auto bad = analyze(bad_net, AnalysisMode::RobustParametric);
    double lambda = NAN;
    if (bad.counterexample) {
        const auto sys = first_order_system(bad_net);
        lambda = max_real_eigenvalue(eval_matrix(upper_bound_matrix(sys), *bad.counterexample));
    }
    const bool ok = rep.verdict == Verdict::Certified && diff <= 1e-12 && bad.verdict == Verdict::Refuted &&
                    bad.counterexample && lambda >= 0.0;
    return {ok, std::string("given box ") + to_string(rep.verdict) + ", det = " + det.to_string() + " (diff " + fmt(diff) +
                    "); flipped " + to_string(bad.verdict) + " with lambda_PF(A+) = " + fmt(lambda)};
}

Outcome c6_oracle() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> off(0.0, 1.0), diag(-4.0, 0.0);
    int compared = 0, disagreements = 0, skipped = 0;
    for (int t = 0; t < 200; ++t) {
        const auto d = static_cast<Eigen::Index>(3 + rng() % 6);
        Eigen::MatrixXd m(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) m(i, j) = i == j ? diag(rng) : off(rng);
        const double lambda = max_real_eigenvalue(m);
        if (std::abs(lambda) <= 1e-5) {
            ++skipped;
            continue;
        }
        ++compared;
        const bool lp_stable = lp_hurwitz_certificate(m).has_value();
        if (lp_stable != (lambda < 0.0)) ++disagreements;
    }
    return {disagreements == 0, std::to_string(compared) + " compared, " + std::to_string(skipped) +
                                    " marginal skipped, " + std::to_string(disagreements) + " disagreements"};
}

Outcome c7_poly() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(0.0, 1.0), point(0.1, 3.0);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t d = 2 + rng() % 5;
        const std::size_t np = 1 + rng() % 4;
        std::vector<std::string> vars;
        for (std::size_t p = 0; p < np; ++p) vars.push_back("r" + std::to_string(p));
        ParamMatrix m(d, d, vars);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                const double sign = i == j ? -1.0 : 1.0;
                m.add(i, j, sign * (i == j ? 2.0 + coef(rng) : coef(rng)));
                if (rng() % 3 == 0) m.add(i, j, sign * coef(rng), vars[rng() % np]);
            }
        const auto det = det_poly(m);
        const auto adj = adjugate(m);
        for (int s = 0; s < 20; ++s) {
            Assignment a;
            for (const auto& v : vars) a[v] = point(rng);
            const Eigen::MatrixXd M = eval_matrix(m, a);
            const double ref = M.determinant();
            const double scale = std::max(std::abs(ref), 1e-300);
            worst = std::max(worst, std::abs(det.eval(a) - ref) / scale);
            const Eigen::MatrixXd prod = eval_matrix(adj, a) * M;
            const Eigen::MatrixXd target = ref * Eigen::MatrixXd::Identity(M.rows(), M.cols());
            worst = std::max(worst, (prod - target).cwiseAbs().maxCoeff() / scale);
        }
    }
    return {worst < 1e-9, "1000 evaluations, worst relative error " + fmt(worst)};
}

Outcome c8_dominance() {
    std::mt19937_64 rng(8);
    int draws = 0, violations = 0;
    double worst = -INFINITY;
    for (int t = 0; t < 50; ++t) {
        const auto net = random_unimolecular(rng, 2 + rng() % 5, 2 + rng() % 4, RateStyle::Interval);
        const auto sys = first_order_system(net);
        const auto a = characteristic_matrix(sys);
        const auto ap = upper_bound_matrix(sys);
        for (int s = 0; s < 100; ++s) {
            Assignment x;
            for (const auto& name : a.variables()) {
                const auto& p = net.param(name);
                x[name] = std::uniform_real_distribution<double>(*p.lower(), *p.upper())(rng);
            }
            const Eigen::MatrixXd ma = eval_matrix(a, x), mp = eval_matrix(ap, x);
            const double gap = pf_eigenvalue(ma) - pf_eigenvalue(mp);
            worst = std::max(worst, gap);
            ++draws;
            if (((mp - ma).array() < -1e-12).any() || gap > 1e-9) ++violations;
        }
    }
    return {violations == 0, std::to_string(draws) + " draws, " + std::to_string(violations) +
                                 " violations, max lambda(A) - lambda(A+) = " + fmt(worst)};
}

Outcome c9_closed_loop() {
    const auto t0 = Clock::now();
    const auto net = load("gene_expression.crn");
    ControllerSpec spec;
    spec.controlled = *net.species_index("Protein");
    spec.actuated = *net.species_index("mRNA");
    spec.mu = 3;
    spec.theta = 1;
    spec.eta = 50;
    spec.k = 1;
    const auto cl = augment_antithetic(net, spec);
    const auto est = stationary_mean(cl.network, State(cl.network.num_species(), 0), 500.0, 0.5, 200, 1);
    const double mean = est.mean[spec.controlled];
    const double secs = seconds_since(t0);
    const double rel = std::abs(mean - 3.0) / 3.0;
    return {rel <= 0.10 && secs < 120.0, "mean " + fmt(mean) + " +- " + fmt(est.std_error[spec.controlled]) +
                                             " (target 3, rel. error " + fmt(rel) + "), " + fmt(secs) + " s"};
}

Outcome c10_modes() {
    std::mt19937_64 rng(10);
    int mismatches = 0, certified = 0, refuted = 0;
    for (int t = 0; t < 20; ++t) {
        const auto net = random_unimolecular(rng, 2 + rng() % 5, 2 + rng() % 5, RateStyle::Fixed);
        const auto a = nominal_check(net).verdict;
        const auto b = robust_check_unimolecular(net).verdict;
        const auto c = robust_check_constant_v(net).verdict;
        if (a != b || a != c) ++mismatches;
        certified += a == Verdict::Certified;
        refuted += a == Verdict::Refuted;
    }
    return {mismatches == 0, "20 networks (" + std::to_string(certified) + " certified, " + std::to_string(refuted) +
                                 " refuted), " + std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"SIR structural certified, A_1 = [[-2,1],[1,-2]], lambda_PF = -1, < 1 s", c1_sir},
        {"circadian structural certified, A_1 = -I4, zero coupling, < 1 s", c2_circadian},
        {"toy case 1 structural certified, (-1)^3 det A_1 = 3", c3_toy1},
        {"toy case 2 structural refuted, coupling radius 1 from a 2-cycle", c4_toy2},
        {"toy robust certified with det = -3 k1; flipped bounds refuted", c5_robust},
        {"LP and eigenvalue Hurwitz verdicts agree on 200 Metzler matrices", c6_oracle},
        {"det_poly and adjugate identity on 50 parametric matrices", c7_poly},
        {"A <= A+ and lambda(A) <= lambda(A+) on 50 interval networks", c8_dominance},
        {"closed-loop gene expression mean within 10% of mu/theta = 3", c9_closed_loop},
        {"nominal, degenerate-box robust and constant-v verdicts agree", c10_modes},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << " -- " << o.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
