#include "crnerg/ergodicity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "crnerg/error.hpp"
#include "crnerg/exact.hpp"
#include "crnerg/linprog.hpp"

namespace crnerg {

const char* to_string(AnalysisMode m) {
    switch (m) {
        case AnalysisMode::Nominal: return "nominal";
        case AnalysisMode::RobustParametric: return "robust";
        case AnalysisMode::RobustConstantV: return "robust-constv";
        case AnalysisMode::Structural: return "structural";
        case AnalysisMode::Bimolecular: return "bimolecular";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Certified: return "certified";
        case Verdict::Refuted: return "refuted";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

constexpr const char* kIrreducibility = "irreducibility of the state space is assumed, not checked";
// Salts for the seeded streams, so that each use draws independent points.
constexpr std::uint64_t kSpotSalt = 0x73706f74ULL;
constexpr std::uint64_t kNilpotencySalt = 0x6e696c70ULL;
constexpr std::uint64_t kRecheckSalt = 0x72636b31ULL;

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::string point_text(const Assignment& a) {
    std::string s = "{";
    for (const auto& [k, v] : a) s += (s.size() > 1 ? ", " : "") + k + "=" + num(v);
    return s + "}";
}

class Timer {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

ErgodicityReport start_report(AnalysisMode mode, const AnalysisOptions& opts) {
    ErgodicityReport r;
    r.mode = mode;
    r.diagnostics = {opts.seed,           opts.tolerances,         opts.handelman_degree, opts.spot_checks,
                     opts.recheck_points, opts.nilpotency_samples, opts.multistart,       0.0};
    r.notes.emplace_back(kIrreducibility);
    return r;
}

ErgodicityReport finish(ErgodicityReport r, const Timer& t) {
    r.diagnostics.wall_time_ms = t.ms();
    return r;
}

void inconclusive(ErgodicityReport& rep, std::string reason) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = std::move(reason);
}

/// Per-parameter values assembled from per-term roles. A shared name that
/// would need two different values is a conflict: no single parameter point
/// realizes the per-term choice.
struct RoleAssignment {
    Assignment values;
    std::vector<std::string> conflicts;

    void set(const std::string& name, double v) {
        const auto [it, inserted] = values.emplace(name, v);
        if (!inserted && it->second != v &&
            std::find(conflicts.begin(), conflicts.end(), name) == conflicts.end())
            conflicts.push_back(name);
    }
};

/// dg at the lower bound, ct at the upper bound, cv at `cv_point` (or its point value).
RoleAssignment worst_case_assignment(const FirstOrderSystem& sys, const Assignment& cv_point) {
    RoleAssignment ra;
    for (const auto& t : sys.terms) {
        const auto& p = sys.domain.at(t.param);
        switch (t.kind) {
            case UniKind::Degradation: ra.set(t.param, *p.lower()); break;
            case UniKind::Catalytic: ra.set(t.param, *p.upper()); break;
            case UniKind::Conversion:
                if (const auto v = p.point_value()) ra.set(t.param, *v);
                else ra.set(t.param, cv_point.at(t.param));
                break;
        }
    }
    return ra;
}

/// dg = 1, cv from `cv_point` (default 1), ct = `ct`.
RoleAssignment structural_assignment(const FirstOrderSystem& sys, const Assignment& cv_point, double ct) {
    RoleAssignment ra;
    for (const auto& t : sys.terms) {
        switch (t.kind) {
            case UniKind::Degradation: ra.set(t.param, 1.0); break;
            case UniKind::Catalytic: ra.set(t.param, ct); break;
            case UniKind::Conversion: {
                const auto it = cv_point.find(t.param);
                ra.set(t.param, it == cv_point.end() ? 1.0 : it->second);
                break;
            }
        }
    }
    return ra;
}

/// Turns a per-term instability witness into a Refuted verdict when it is a
/// genuine parameter point, the instability is confirmed on the actual
/// matrix, and refutation is allowed (the reduction, if any, is exact).
void refute(ErgodicityReport& rep, const FirstOrderSystem& sys, const RoleAssignment& ra, const AnalysisOptions& opts,
            bool may_refute, const std::string& reason) {
    if (!ra.conflicts.empty()) {
        inconclusive(rep, reason + "; no counterexample is reported because shared parameter '" + ra.conflicts.front() +
                              "' would need different values in different reactions");
        return;
    }
    const double lam = pf_eigenvalue(eval_matrix(characteristic_matrix(sys), ra.values));
    if (lam < -opts.tolerances.marginal) {
        inconclusive(rep, reason + "; the instability did not reproduce on the actual matrix (lambda_PF = " + num(lam) + ")");
        return;
    }
    if (!may_refute) {
        inconclusive(rep, reason + "; the bimolecular reduction is not exact, so this does not refute the full condition");
        rep.notes.push_back("unstable reduced matrix at " + point_text(ra.values));
        return;
    }
    rep.verdict = Verdict::Refuted;
    rep.reason = reason;
    rep.counterexample = ra.values;
    rep.counterexample_lambda = lam;
}

Assignment box_sample(std::mt19937_64& rng, const Box& box) {
    Assignment a;
    for (const auto& [name, iv] : box) a[name] = std::uniform_real_distribution<double>(iv.lo, iv.hi)(rng);
    return a;
}

/// Log-uniform point in [1e-2, 1e2]^n.
Assignment orthant_sample(std::mt19937_64& rng, const std::vector<std::string>& vars) {
    std::uniform_real_distribution<double> e(-2.0, 2.0);
    Assignment a;
    for (const auto& v : vars) a[v] = std::pow(10.0, e(rng));
    return a;
}

Box cv_box(const ParamMatrix& ap, const FirstOrderSystem& sys) {
    Box box;
    for (const auto& v : ap.variables()) {
        const auto& p = sys.domain.at(v);
        box[v] = Interval{*p.lower(), *p.upper()};
    }
    return box;
}

std::vector<Assignment> box_vertices(const Box& box, std::size_t limit) {
    if (box.size() > limit)
        throw VertexLimitExceeded("n_cv = " + std::to_string(box.size()) + " exceeds the vertex limit " +
                                  std::to_string(limit));
    std::vector<Assignment> out;
    const std::size_t n = box.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        Assignment a;
        std::size_t bit = 0;
        for (const auto& [name, iv] : box) a[name] = (mask >> bit++) & 1U ? iv.hi : iv.lo;
        out.push_back(std::move(a));
    }
    return out;
}

bool is_unit_conversion(const LinearTerm& t) {
    int neg = 0, pos = 0;
    for (int s : t.stoich) {
        if (s == -1) ++neg;
        else if (s == 1) ++pos;
        else if (s != 0) return false;
    }
    return neg == 1 && pos == 1;
}

TermRate structural_rates(bool cv_symbolic) {
    return [cv_symbolic](const LinearTerm& t) -> std::optional<double> {
        switch (t.kind) {
            case UniKind::Degradation: return 1.0;
            case UniKind::Catalytic: return 0.0;
            case UniKind::Conversion: return cv_symbolic ? std::nullopt : std::optional<double>(1.0);
        }
        return std::nullopt;
    };
}

// ---------------------------------------------------------------------------
// Catalytic coupling W_ct (-A^{-1}) S_ct
// ---------------------------------------------------------------------------

struct Coupling {
    Eigen::MatrixXd value;
    std::vector<std::vector<bool>> support;
};

/// Exact coupling for a matrix with exactly representable entries.
Coupling coupling_exact(const FirstOrderSystem& sys, const Eigen::MatrixXd& a) {
    const auto ct = sys.terms_of_kind(UniKind::Catalytic);
    const auto n = ct.size();
    const auto inv = inverse(RationalMatrix::from_double(a));
    Coupling c{Eigen::MatrixXd::Zero(ix(n), ix(n)), std::vector<std::vector<bool>>(n, std::vector<bool>(n, false))};
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            Rational s = 0;
            for (std::size_t i = 0; i < sys.dim(); ++i)
                if (ct[q]->stoich[i] != 0) s -= inv(ct[p]->reactant, i) * ct[q]->stoich[i];
            c.value(ix(p), ix(q)) = s.convert_to<double>();
            c.support[p][q] = s != 0;
        }
    return c;
}

/// Floating-point coupling; entries below 1e-9 of the largest are structural zeros.
Coupling coupling_numeric(const FirstOrderSystem& sys, const Eigen::MatrixXd& a) {
    const auto ct = sys.terms_of_kind(UniKind::Catalytic);
    const auto n = ct.size();
    const Eigen::MatrixXd neg_inv = -a.partialPivLu().inverse();
    Coupling c{Eigen::MatrixXd::Zero(ix(n), ix(n)), std::vector<std::vector<bool>>(n, std::vector<bool>(n, false))};
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            double s = 0.0;
            for (std::size_t i = 0; i < sys.dim(); ++i) s += neg_inv(ix(ct[p]->reactant), ix(i)) * ct[q]->stoich[i];
            c.value(ix(p), ix(q)) = s;
        }
    const double scale = n == 0 ? 0.0 : c.value.cwiseAbs().maxCoeff();
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) c.support[p][q] = std::abs(c.value(ix(p), ix(q))) > 1e-9 * scale;
    return c;
}

double support_radius(const Coupling& c) {
    Eigen::MatrixXd m = c.value;
    for (Eigen::Index p = 0; p < m.rows(); ++p)
        for (Eigen::Index q = 0; q < m.cols(); ++q)
            m(p, q) = c.support[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] ? std::max(m(p, q), 0.0) : 0.0;
    return spectral_radius_nonneg(m, 0.0).radius;
}

// ---------------------------------------------------------------------------
// Pipelines on a first-order system (original or reduced)
// ---------------------------------------------------------------------------

/// Interval rates: midpoint anchor, determinant positivity on the cv box,
/// adjugate certificate with a spot check.
void parametric_pipeline(const FirstOrderSystem& sys, const AnalysisOptions& opts, ErgodicityReport& rep, bool reduced,
                         bool may_refute) {
    const auto ap = upper_bound_matrix(sys);
    const auto box = cv_box(ap, sys);
    const auto d = sys.dim();

    if (box.empty()) {
        const Eigen::MatrixXd m = eval_matrix(ap, Assignment{});
        const auto h = is_hurwitz_metzler(m, opts.tolerances);
        if (h.verdict == Stability::Stable) {
            rep.verdict = Verdict::Certified;
            rep.reason = "A+ has no interval conversion rates and is Hurwitz (lambda_PF = " + num(h.lambda_pf) + ")";
            rep.certificate = VectorCertificate{*h.certificate, "A+", {Assignment{}}, {m}, false, reduced};
        } else if (h.verdict == Stability::Unstable) {
            refute(rep, sys, worst_case_assignment(sys, {}), opts, may_refute,
                   "A+ is not Hurwitz (lambda_PF = " + num(h.lambda_pf) + ")");
        } else {
            inconclusive(rep, "A+ is marginally stable (lambda_PF = " + num(h.lambda_pf) + ")");
        }
        return;
    }

    Assignment mid;
    for (const auto& [name, iv] : box) mid[name] = 0.5 * (iv.lo + iv.hi);
    const auto hm = is_hurwitz_metzler(eval_matrix(ap, mid), opts.tolerances);
    if (hm.verdict == Stability::Unstable) {
        refute(rep, sys, worst_case_assignment(sys, mid), opts, may_refute,
               "A+ is not Hurwitz at the box midpoint (lambda_PF = " + num(hm.lambda_pf) + ")");
        return;
    }
    if (hm.verdict == Stability::Marginal) {
        inconclusive(rep, "A+ is marginally stable at the box midpoint");
        return;
    }

    MultiPoly p = det_poly(ap);
    if (d % 2 == 1) p = -p;
    const PositivityOptions po{opts.handelman_degree, opts.multistart, opts.seed, opts.parallel};
    const auto pos = certify_positive_on_box(p, box, po);
    if (pos.status == PositivityStatus::Counterexample) {
        Assignment pt = mid;
        for (const auto& [k, v] : pos.point) pt[k] = v;
        refute(rep, sys, worst_case_assignment(sys, pt), opts, may_refute,
               "(-1)^d det A+ = " + num(pos.value) + " <= 0 at " + point_text(pt) + ", so A+ is not Hurwitz there");
        return;
    }
    if (pos.status == PositivityStatus::Inconclusive) {
        inconclusive(rep, "no Handelman certificate for (-1)^d det A+ up to degree " + std::to_string(pos.max_degree) +
                              "; a higher degree may succeed");
        return;
    }

    const auto v = adjugate_vector(ap);
    std::mt19937_64 rng(splitmix64(opts.seed ^ kSpotSalt));
    for (int s = 0; s < opts.spot_checks; ++s) {
        const auto pt = box_sample(rng, box);
        const Eigen::MatrixXd m = eval_matrix(ap, pt);
        Eigen::RowVectorXd vv(ix(d));
        for (std::size_t i = 0; i < d; ++i) vv(ix(i)) = v[i].eval(pt);
        if (!((vv.array() > 0.0).all() && ((vv * m).array() < 0.0).all())) {
            inconclusive(rep, "adjugate certificate failed its spot check at " + point_text(pt));
            return;
        }
    }
    rep.verdict = Verdict::Certified;
    rep.reason = "A+ is Hurwitz at the midpoint and (-1)^d det A+ is positive on the box (" + pos.method + ")";
    rep.certificate = PolynomialCertificate{v, p, box, pos.method, pos.certificate, mid, hm.lambda_pf, reduced};
}

struct ConstantVResult {
    std::optional<Eigen::VectorXd> v;
    std::vector<Assignment> vertices;
    std::vector<Eigen::MatrixXd> matrices;
};

/// One LP for a common v over all vertices of the cv box (and v^T S_b = 0).
ConstantVResult constant_v_lp(const FirstOrderSystem& sys, const IntMatrix& sb, const AnalysisOptions& opts) {
    const auto ap = upper_bound_matrix(sys);
    ConstantVResult r;
    r.vertices = box_vertices(cv_box(ap, sys), opts.vertex_limit);
    const auto d = sys.dim();
    FeasibilityProblem fp(d);
    fp.slack = opts.tolerances.epsilon;
    for (std::size_t i = 0; i < d; ++i) {
        fp.lower[i] = 1.0;
        fp.objective[i] = 1.0;
    }
    for (const auto& vx : r.vertices) {
        r.matrices.push_back(eval_matrix(ap, vx));
        const auto& m = r.matrices.back();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::vector<double> row(m.rows());
            for (Eigen::Index i = 0; i < m.rows(); ++i) row[static_cast<std::size_t>(i)] = m(i, j);
            fp.add_row(std::move(row), RowSense::Less, 0.0);
        }
    }
    for (Eigen::Index j = 0; j < sb.cols(); ++j) {
        std::vector<double> row(d);
        for (std::size_t i = 0; i < d; ++i) row[i] = sb(ix(i), j);
        fp.add_row(std::move(row), RowSense::Equal, 0.0);
    }
    if (const auto sol = solve_strict_feasibility(fp)) r.v = Eigen::Map<const Eigen::VectorXd>(sol->data(), ix(d));
    return r;
}

void structural_pipeline(const FirstOrderSystem& sys, const AnalysisOptions& opts, ErgodicityReport& rep, bool reduced,
                         bool may_refute) {
    const auto cv = sys.terms_of_kind(UniKind::Conversion);
    const bool unit_cv = std::all_of(cv.begin(), cv.end(), [](const LinearTerm* t) { return is_unit_conversion(*t); });
    StructuralCertificate cert;
    cert.reduced = reduced;

    if (unit_cv) {
        cert.route = "unit-rates";
        cert.a_one = eval_matrix(assemble_matrix(sys, structural_rates(false)), Assignment{});
        const auto h = is_hurwitz_metzler(cert.a_one, opts.tolerances);
        cert.lambda_pf = h.lambda_pf;
        if (h.verdict == Stability::Unstable) {
            refute(rep, sys, structural_assignment(sys, {}, 1.0), opts, may_refute,
                   "A at unit rates without catalytic reactions is not Hurwitz (lambda_PF = " + num(h.lambda_pf) +
                       "); catalytic reactions only raise lambda_PF");
            return;
        }
        if (h.verdict == Stability::Marginal) {
            inconclusive(rep, "A at unit rates without catalytic reactions is marginally stable");
            return;
        }
        const auto c = coupling_exact(sys, cert.a_one);
        cert.coupling = c.value;
        const auto cycle = find_cycle(c.support);
        cert.nilpotent = !cycle;
        if (cycle) {
            cert.cycle = *cycle;
            cert.radius = support_radius(c);
            rep.certificate = cert;
            refute(rep, sys, structural_assignment(sys, {}, 2.0 / cert.radius), opts, may_refute,
                   "the catalytic coupling has spectral radius " + num(cert.radius) + " > 0 (cycle of length " +
                       std::to_string(cycle->size()) + "); catalytic rates " + num(2.0 / cert.radius) +
                       " make A unstable");
            return;
        }
        rep.verdict = Verdict::Certified;
        rep.reason = "A at unit rates is Hurwitz and the catalytic coupling is nilpotent";
        rep.certificate = cert;
        return;
    }

    // Conversion columns beyond the unit pattern: orthant test of the determinant
    // plus sampled nilpotency.
    cert.route = "orthant";
    const auto an = assemble_matrix(sys, structural_rates(true));
    const auto& cvars = an.variables();
    Assignment ones;
    for (const auto& v : cvars) ones[v] = 1.0;
    cert.a_one = eval_matrix(an, ones);
    const auto h = is_hurwitz_metzler(cert.a_one, opts.tolerances);
    cert.lambda_pf = h.lambda_pf;
    if (h.verdict == Stability::Unstable) {
        refute(rep, sys, structural_assignment(sys, ones, 1.0), opts, may_refute,
               "A at unit rates without catalytic reactions is not Hurwitz (lambda_PF = " + num(h.lambda_pf) + ")");
        return;
    }
    if (h.verdict == Stability::Marginal) {
        inconclusive(rep, "A at unit rates without catalytic reactions is marginally stable");
        return;
    }
    MultiPoly p = det_poly(an);
    if (sys.dim() % 2 == 1) p = -p;
    cert.det = p;
    const auto orth = positive_on_orthant(p, PositivityOptions{-1, opts.multistart, opts.seed, opts.parallel});
    if (orth.status == PositivityStatus::Counterexample) {
        Assignment pt = ones;
        for (const auto& [k, v] : orth.point) pt[k] = v;
        refute(rep, sys, structural_assignment(sys, pt, 1.0), opts, may_refute,
               "(-1)^d det A(1, rho_cv, 0) = " + num(orth.value) + " <= 0 at " + point_text(pt));
        return;
    }
    if (orth.status == PositivityStatus::Inconclusive) {
        inconclusive(rep, "positivity of (-1)^d det A(1, rho_cv, 0) on the orthant could not be decided");
        return;
    }
    cert.det_method = orth.method;

    std::mt19937_64 rng(splitmix64(opts.seed ^ kNilpotencySalt));
    const int samples = std::max(1, opts.nilpotency_samples);
    Coupling first;
    for (int s = 0; s < samples; ++s) {
        const auto pt = s == 0 ? ones : orthant_sample(rng, cvars);
        const auto c = coupling_numeric(sys, eval_matrix(an, pt));
        if (s == 0) {
            first = c;
        } else if (c.support != first.support) {
            inconclusive(rep, "the support of the catalytic coupling differs between sample points " +
                                  point_text(ones) + " and " + point_text(pt));
            return;
        }
    }
    cert.samples = samples;
    cert.coupling = first.value;
    const auto cycle = find_cycle(first.support);
    cert.nilpotent = !cycle;
    if (cycle) {
        cert.cycle = *cycle;
        cert.radius = support_radius(first);
        rep.certificate = cert;
        refute(rep, sys, structural_assignment(sys, ones, 2.0 / cert.radius), opts, may_refute,
               "the catalytic coupling has spectral radius " + num(cert.radius) + " > 0; catalytic rates " +
                   num(2.0 / cert.radius) + " make A unstable");
        return;
    }
    rep.verdict = Verdict::Certified;
    rep.reason = "(-1)^d det A(1, rho_cv, 0) is positive on the orthant, A is Hurwitz at unit rates, and the "
                 "catalytic coupling is nilpotent at every sample";
    rep.certificate = cert;
}

bool all_free(const FirstOrderSystem& sys) {
    return std::all_of(sys.domain.begin(), sys.domain.end(), [](const auto& kv) { return kv.second.is_free(); });
}

std::string row_label(const IntMatrix& perp, Eigen::Index r, const std::vector<std::string>& species) {
    std::string s;
    for (Eigen::Index j = 0; j < perp.cols(); ++j) {
        const int c = perp(r, j);
        if (c == 0) continue;
        if (!s.empty()) s += "+";
        if (c != 1) s += std::to_string(c) + "*";
        s += species[static_cast<std::size_t>(j)];
    }
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

std::optional<Reduction> reduce_bimolecular(const ReactionNetwork& net, std::string* why) {
    auto fail = [why](const std::string& msg) -> std::optional<Reduction> {
        if (why) *why = msg;
        return std::nullopt;
    };
    const auto st = build_stoichiometry(net);
    Reduction red;
    red.sb_perp = left_nullspace_basis(st.second);
    const auto& perp = red.sb_perp;
    const auto r = static_cast<std::size_t>(perp.rows());
    const auto d = net.num_species();
    const auto& names = net.species();
    if (r == 0) return fail("S_b has full row rank, so no v > 0 satisfies v^T S_b = 0");
    if ((perp.array() < 0).any())
        return fail("the left null space basis of S_b has negative entries; positivity of v cannot be read off the "
                    "reduced weights");
    for (std::size_t j = 0; j < d; ++j)
        if (perp.col(ix(j)).isZero())
            return fail("v^T S_b = 0 forces v_" + names[j] + " = 0, so no positive v exists");

    const auto sys = first_order_system(net);
    auto strictly_positive = [&sys](const std::string& name) {
        const auto& p = sys.domain.at(name);
        if (p.is_free()) return true;
        const auto lo = p.lower();
        return lo && *lo > 0.0;
    };

    // P = S_b^perp A(rho), symbolic.
    ParamMatrix proj(r, d);
    std::vector<std::vector<int>> reduced_stoich;
    for (const auto& t : sys.terms) {
        std::vector<int> s(r, 0);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t k = 0; k < d; ++k) s[i] += perp(ix(i), ix(k)) * t.stoich[k];
        for (std::size_t i = 0; i < r; ++i)
            if (s[i] != 0) proj.add(i, t.reactant, s[i], t.param);
        reduced_stoich.push_back(std::move(s));
    }
    std::vector<bool> droppable(d, false);
    for (std::size_t j = 0; j < d; ++j) {
        bool nonpositive = true, strict = false;
        for (std::size_t i = 0; i < r; ++i) {
            const auto& cell = proj(i, j);
            for (const auto& [e, c] : cell.terms()) {
                if (c > 0.0) nonpositive = false;
                for (std::size_t k = 0; k < e.size(); ++k)
                    if (e[k] > 0 && c < 0.0 && strictly_positive(cell.variables()[k])) strict = true;
            }
        }
        droppable[j] = nonpositive && strict;
    }

    // Pair each row with a column, preferring columns where the row is the
    // only nonzero entry and, among those, columns that cannot be dropped.
    // Every unpaired column must then be droppable.
    auto private_col = [&perp](std::size_t i, std::size_t j) {
        if (perp(ix(i), ix(j)) <= 0) return false;
        for (Eigen::Index k = 0; k < perp.rows(); ++k)
            if (static_cast<std::size_t>(k) != i && perp(k, ix(j)) != 0) return false;
        return true;
    };
    std::vector<std::optional<std::size_t>> pair(r);
    std::vector<bool> used(d, false);
    auto pick = [&](std::size_t i, auto&& accept) {
        for (std::size_t j = 0; j < d && !pair[i]; ++j)
            if (!used[j] && accept(j)) {
                pair[i] = j;
                used[j] = true;
            }
    };
    for (std::size_t i = 0; i < r; ++i) pick(i, [&](std::size_t j) { return private_col(i, j) && !droppable[j]; });
    for (std::size_t i = 0; i < r; ++i) pick(i, [&](std::size_t j) { return private_col(i, j); });
    for (std::size_t i = 0; i < r; ++i) pick(i, [&](std::size_t j) { return perp(ix(i), ix(j)) > 0 && !droppable[j]; });
    for (std::size_t i = 0; i < r; ++i) pick(i, [&](std::size_t j) { return !droppable[j]; });
    for (std::size_t i = 0; i < r; ++i) pick(i, [&](std::size_t) { return true; });
    for (std::size_t j = 0; j < d; ++j) {
        if (used[j]) continue;
        if (!droppable[j])
            return fail("column " + names[j] + " of S_b^perp A is left over after pairing " + std::to_string(r) +
                        " reduced coordinates with species, and it is not negative for all rates");
        red.dropped.push_back(j);
    }
    std::vector<std::optional<std::size_t>> column_of(d);
    for (std::size_t i = 0; i < r; ++i) {
        red.kept.push_back(*pair[i]);
        column_of[*pair[i]] = i;
    }

    red.exact = true;
    for (std::size_t i = 0; i < r; ++i) {
        bool has_private = false;
        for (std::size_t j = 0; j < d; ++j) has_private = has_private || private_col(i, j);
        red.exact = red.exact && has_private;
    }

    for (std::size_t i = 0; i < r; ++i) red.row_labels.push_back(row_label(perp, ix(i), names));
    red.system.species = red.row_labels;
    for (std::size_t k = 0; k < sys.terms.size(); ++k) {
        const auto& t = sys.terms[k];
        if (!column_of[t.reactant]) continue;
        LinearTerm rt = t;
        rt.stoich = reduced_stoich[k];
        rt.reactant = *column_of[t.reactant];
        try {
            rt.kind = classify_column(rt.stoich);
        } catch (const ClassificationError&) {
            return fail("the reduced column of reaction " + std::to_string(t.reaction + 1) +
                        " has two negative entries and cannot be classified");
        }
        red.system.domain.emplace(t.param, sys.domain.at(t.param));
        red.system.terms.push_back(std::move(rt));
    }
    if (!characteristic_matrix(red.system).structurally_metzler())
        return fail("the reduced matrix is not Metzler for the chosen pairing of rows and columns");
    return red;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

ErgodicityReport nominal_check(const ReactionNetwork& net, const AnalysisOptions& opts) {
    const Timer timer;
    require_valid(net);
    auto rep = start_report(AnalysisMode::Nominal, opts);
    const auto sys = first_order_system(net);
    Assignment point;
    for (const auto& name : sys.param_names()) {
        const auto& p = sys.domain.at(name);
        const auto v = p.point_value();
        if (!v)
            throw WrongMode("nominal mode needs fixed first-order rates; '" + name + "' is " +
                            (p.is_free() ? "free (use --mode structural)" : "an interval (use --mode robust)"));
        point[name] = *v;
    }
    const Eigen::MatrixXd a = eval_matrix(characteristic_matrix(sys), point);
    const auto st = build_stoichiometry(net);

    if (st.second.cols() == 0) {
        const auto h = is_hurwitz_metzler(a, opts.tolerances);
        if (h.verdict == Stability::Stable) {
            rep.verdict = Verdict::Certified;
            rep.reason = "A is Hurwitz (lambda_PF = " + num(h.lambda_pf) + ")";
            rep.certificate = VectorCertificate{*h.certificate, "A", {point}, {a}, false, false};
        } else if (h.verdict == Stability::Unstable) {
            rep.verdict = Verdict::Refuted;
            rep.reason = "A is not Hurwitz (lambda_PF = " + num(h.lambda_pf) + ")";
            rep.counterexample = point;
            rep.counterexample_lambda = h.lambda_pf;
        } else {
            inconclusive(rep, "A is marginally stable (lambda_PF = " + num(h.lambda_pf) + ")");
        }
        return finish(std::move(rep), timer);
    }

    const auto d = sys.dim();
    FeasibilityProblem fp(d);
    fp.slack = opts.tolerances.epsilon;
    for (std::size_t i = 0; i < d; ++i) {
        fp.lower[i] = 1.0;
        fp.objective[i] = 1.0;
    }
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        std::vector<double> row(d);
        for (std::size_t i = 0; i < d; ++i) row[i] = a(ix(i), j);
        fp.add_row(std::move(row), RowSense::Less, 0.0);
    }
    for (Eigen::Index j = 0; j < st.second.cols(); ++j) {
        std::vector<double> row(d);
        for (std::size_t i = 0; i < d; ++i) row[i] = st.second(ix(i), j);
        fp.add_row(std::move(row), RowSense::Equal, 0.0);
    }
    if (const auto sol = solve_strict_feasibility(fp)) {
        rep.verdict = Verdict::Certified;
        rep.reason = "v >= 1 with v^T S_b = 0 and v^T A < 0 exists";
        rep.certificate =
            VectorCertificate{Eigen::Map<const Eigen::VectorXd>(sol->data(), ix(d)), "A", {point}, {a}, true, false};
        return finish(std::move(rep), timer);
    }

    std::string why;
    auto red = reduce_bimolecular(net, &why);
    if (!red) {
        inconclusive(rep, "no v with v^T S_b = 0 and v^T A < 0, and no instability witness: " + why);
        return finish(std::move(rep), timer);
    }
    rep.reduction = red;
    const auto h = is_hurwitz_metzler(eval_matrix(characteristic_matrix(red->system), point), opts.tolerances);
    if (h.verdict == Stability::Unstable) {
        refute(rep, red->system, RoleAssignment{point, {}}, opts, red->exact,
               "the reduced matrix is not Hurwitz (lambda_PF = " + num(h.lambda_pf) + ")");
    } else {
        inconclusive(rep, std::string("no v with v^T S_b = 0 and v^T A < 0; the reduced matrix is ") +
                              to_string(h.verdict));
    }
    return finish(std::move(rep), timer);
}

ErgodicityReport robust_check_unimolecular(const ReactionNetwork& net, const AnalysisOptions& opts) {
    const Timer timer;
    require_valid(net);
    if (net.has_bimolecular())
        throw WrongMode("the network has bimolecular reactions; use --mode bimolecular");
    auto rep = start_report(AnalysisMode::RobustParametric, opts);
    parametric_pipeline(first_order_system(net), opts, rep, false, true);
    return finish(std::move(rep), timer);
}

ErgodicityReport robust_check_constant_v(const ReactionNetwork& net, const AnalysisOptions& opts) {
    const Timer timer;
    require_valid(net);
    auto rep = start_report(AnalysisMode::RobustConstantV, opts);
    const auto sys = first_order_system(net);
    const auto sb = build_stoichiometry(net).second;
    const auto r = constant_v_lp(sys, sb, opts);
    const bool with_sb = sb.cols() > 0;

    if (r.v) {
        for (const auto& m : r.matrices) {
            const double lam = pf_eigenvalue(m);
            if (!with_sb && std::abs(lam) <= opts.tolerances.marginal) {
                inconclusive(rep, "a vertex of the box gives a marginally stable A+ (lambda_PF = " + num(lam) + ")");
                return finish(std::move(rep), timer);
            }
        }
        rep.verdict = Verdict::Certified;
        rep.reason = "one v satisfies v^T A+ < 0 at all " + std::to_string(r.vertices.size()) + " vertices";
        rep.certificate = VectorCertificate{*r.v, "A+", r.vertices, r.matrices, with_sb, false};
        rep.notes.emplace_back("a constant v also certifies rates that vary in time inside the box");
        return finish(std::move(rep), timer);
    }
    if (!with_sb) {
        for (std::size_t k = 0; k < r.vertices.size(); ++k) {
            const auto h = is_hurwitz_metzler(r.matrices[k], opts.tolerances);
            if (h.verdict == Stability::Unstable) {
                refute(rep, sys, worst_case_assignment(sys, r.vertices[k]), opts, true,
                       "A+ is not Hurwitz at vertex " + point_text(r.vertices[k]) + " (lambda_PF = " +
                           num(h.lambda_pf) + ")");
                if (rep.verdict == Verdict::Refuted) return finish(std::move(rep), timer);
            }
        }
    }
    inconclusive(rep, "no common v for the " + std::to_string(r.vertices.size()) +
                          " vertices; the constant-v test is only sufficient");
    return finish(std::move(rep), timer);
}

ErgodicityReport structural_check(const ReactionNetwork& net, const AnalysisOptions& opts) {
    const Timer timer;
    require_valid(net);
    auto rep = start_report(AnalysisMode::Structural, opts);
    FirstOrderSystem sys;
    bool exact = true;
    if (net.has_bimolecular()) {
        std::string why;
        auto red = reduce_bimolecular(net, &why);
        if (!red) {
            inconclusive(rep, "bimolecular reduction not applicable: " + why);
            return finish(std::move(rep), timer);
        }
        sys = red->system;
        exact = red->exact;
        rep.reduction = std::move(red);
    } else {
        sys = first_order_system(net);
    }
    if (!all_free(sys))
        rep.notes.emplace_back("fixed and interval first-order rates are treated as free; a structural certificate "
                               "covers their values too");
    structural_pipeline(sys, opts, rep, net.has_bimolecular(), exact);
    return finish(std::move(rep), timer);
}

ErgodicityReport robust_check_bimolecular(const ReactionNetwork& net, const AnalysisOptions& opts) {
    const Timer timer;
    require_valid(net);
    const auto sys = first_order_system(net);
    if (std::any_of(sys.domain.begin(), sys.domain.end(), [](const auto& kv) { return kv.second.is_free(); })) {
        auto rep = structural_check(net, opts);
        rep.mode = AnalysisMode::Bimolecular;
        rep.notes.emplace_back("free first-order rates: the structural path was used; it covers every positive value");
        return finish(std::move(rep), timer);
    }
    auto rep = start_report(AnalysisMode::Bimolecular, opts);
    const auto sb = build_stoichiometry(net).second;
    try {
        const auto r = constant_v_lp(sys, sb, opts);
        if (r.v) {
            rep.verdict = Verdict::Certified;
            rep.reason = "one v with v^T S_b = 0 satisfies v^T A+ < 0 at all " + std::to_string(r.vertices.size()) +
                         " vertices";
            rep.certificate = VectorCertificate{*r.v, "A+", r.vertices, r.matrices, sb.cols() > 0, false};
            rep.notes.emplace_back("a constant v also certifies rates that vary in time inside the box");
            return finish(std::move(rep), timer);
        }
        rep.notes.emplace_back("constant-v vertex LP infeasible; trying the reduced parametric system");
    } catch (const VertexLimitExceeded& e) {
        rep.notes.emplace_back(std::string("constant-v vertex LP skipped: ") + e.what());
    }
    std::string why;
    auto red = reduce_bimolecular(net, &why);
    if (!red) {
        inconclusive(rep, "bimolecular reduction not applicable: " + why);
        return finish(std::move(rep), timer);
    }
    const auto reduced = red->system;
    const bool exact = red->exact;
    rep.reduction = std::move(red);
    parametric_pipeline(reduced, opts, rep, true, exact);
    return finish(std::move(rep), timer);
}

AnalysisMode auto_mode(const ReactionNetwork& net) {
    if (net.has_free_params()) return AnalysisMode::Structural;
    if (net.has_interval_params())
        return net.has_bimolecular() ? AnalysisMode::Bimolecular : AnalysisMode::RobustParametric;
    return AnalysisMode::Nominal;
}

ErgodicityReport analyze(const ReactionNetwork& net, AnalysisMode mode, const AnalysisOptions& opts) {
    switch (mode) {
        case AnalysisMode::Nominal: return nominal_check(net, opts);
        case AnalysisMode::RobustParametric:
            return net.has_bimolecular() ? robust_check_bimolecular(net, opts) : robust_check_unimolecular(net, opts);
        case AnalysisMode::RobustConstantV: return robust_check_constant_v(net, opts);
        case AnalysisMode::Structural: return structural_check(net, opts);
        case AnalysisMode::Bimolecular: return robust_check_bimolecular(net, opts);
    }
    throw ContractViolation("unknown analysis mode");
}

// ---------------------------------------------------------------------------
// Independent checker
// ---------------------------------------------------------------------------

namespace {

/// Directed acyclicity by Kahn's algorithm (independent of find_cycle).
bool acyclic(const std::vector<std::vector<bool>>& support) {
    const auto n = support.size();
    std::vector<int> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) indeg[j] += support[i][j] ? 1 : 0;
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) queue.push_back(i);
    std::size_t seen = 0;
    while (!queue.empty()) {
        const auto i = queue.back();
        queue.pop_back();
        ++seen;
        for (std::size_t j = 0; j < n; ++j)
            if (support[i][j] && --indeg[j] == 0) queue.push_back(j);
    }
    return seen == n;
}

struct Checker {
    CheckResult result;
    void require(bool ok, const std::string& what) {
        if (ok) return;
        result.ok = false;
        result.problems.push_back(what);
    }
};

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

CheckResult verify_report(const ReactionNetwork& net, const ErgodicityReport& report, const AnalysisOptions& opts) {
    Checker chk;
    const double eps = report.diagnostics.tolerances.epsilon;
    const double marginal = report.diagnostics.tolerances.marginal;

    std::optional<Reduction> red;
    if (report.reduction || net.has_bimolecular()) red = reduce_bimolecular(net);
    if (report.reduction) {
        chk.require(red.has_value(), "the stored reduction cannot be re-derived");
        if (!red) return chk.result;
        chk.require(red->sb_perp == report.reduction->sb_perp && red->kept == report.reduction->kept,
                    "the re-derived reduction differs from the stored one");
    }
    auto system_for = [&](bool reduced) { return reduced && red ? red->system : first_order_system(net); };

    if (report.verdict == Verdict::Refuted) {
        chk.require(report.counterexample.has_value(), "refuted report without a counterexample");
        if (!report.counterexample) return chk.result;
        const auto sys = system_for(report.reduction.has_value());
        const auto m = eval_matrix(characteristic_matrix(sys), *report.counterexample);
        chk.require(is_metzler(m), "the matrix at the counterexample is not Metzler");
        const double lam = max_real_eigenvalue(m);
        chk.require(lam >= -marginal, "lambda at the counterexample is " + num(lam) + " < -" + num(marginal));
        for (const auto& [name, value] : *report.counterexample) {
            const auto* p = net.find_param(name);
            chk.require(p != nullptr, "counterexample assigns unknown parameter '" + name + "'");
            if (!p) continue;
            chk.require(value > 0.0 || (p->lower() && value >= *p->lower()), "counterexample value of '" + name + "' is not positive");
            if (report.mode != AnalysisMode::Structural && !p->is_free())
                chk.require(value >= *p->lower() - 1e-12 && value <= *p->upper() + 1e-12,
                            "counterexample value of '" + name + "' lies outside its interval");
        }
        return chk.result;
    }
    if (report.verdict != Verdict::Certified) return chk.result;

    if (const auto* vc = std::get_if<VectorCertificate>(&report.certificate)) {
        const auto sys = system_for(vc->reduced);
        const auto m = vc->matrix == "A+" ? upper_bound_matrix(sys) : characteristic_matrix(sys);
        chk.require(vc->points.size() == vc->matrices.size() && !vc->points.empty(), "vector certificate lists no matrices");
        chk.require((vc->v.array() >= 1.0 - 1e-9).all(), "certificate vector is not >= 1");
        for (std::size_t k = 0; k < vc->points.size() && k < vc->matrices.size(); ++k) {
            const Eigen::MatrixXd mk = eval_matrix(m, vc->points[k]);
            chk.require(max_abs(mk - vc->matrices[k]) <= 1e-12 * std::max(1.0, max_abs(mk)),
                        "stored matrix " + std::to_string(k) + " does not match the network");
            const Eigen::RowVectorXd row = vc->v.transpose() * mk;
            chk.require(row.size() == 0 || row.maxCoeff() <= -0.5 * eps,
                        "v^T M has residual " + num(row.size() ? row.maxCoeff() : 0.0) + " at point " + std::to_string(k));
        }
        if (vc->with_sb) {
            const Eigen::MatrixXd sb = build_stoichiometry(net).second.cast<double>();
            chk.require(max_abs(vc->v.transpose() * sb) <= 1e-9 * std::max(1.0, max_abs(vc->v)), "v^T S_b != 0");
        }
    } else if (const auto* pc = std::get_if<PolynomialCertificate>(&report.certificate)) {
        const auto sys = system_for(pc->reduced);
        const auto ap = upper_bound_matrix(sys);
        const auto d = ap.rows();
        MultiPoly det = det_poly(ap);
        if (d % 2 == 1) det = -det;
        double scale = 1.0;
        for (const auto& [e, c] : det.terms()) scale = std::max(scale, std::abs(c));
        chk.require(MultiPoly::max_coeff_diff(det, pc->det) <= 1e-9 * scale, "stored determinant does not match");
        if (pc->handelman) {
            const auto& h = *pc->handelman;
            chk.require(h.delta > 0.0, "Handelman margin is not positive");
            chk.require(std::all_of(h.products.begin(), h.products.end(), [](const auto& p) { return p.coeff >= 0.0; }),
                        "Handelman coefficient is negative");
            chk.require(MultiPoly::max_coeff_diff(h.reconstruct(), pc->det) <= 1e-8 * scale,
                        "Handelman representation does not reconstruct the determinant");
        }
        std::mt19937_64 rng(splitmix64(opts.seed ^ kRecheckSalt));
        for (int s = 0; s < opts.recheck_points; ++s) {
            const auto pt = box_sample(rng, pc->box);
            const Eigen::MatrixXd m = eval_matrix(ap, pt);
            Eigen::RowVectorXd vv(ix(d));
            for (std::size_t i = 0; i < d; ++i) vv(ix(i)) = pc->v[i].eval(pt);
            chk.require((vv.array() > 0.0).all(), "v(rho) is not positive at " + point_text(pt));
            chk.require(((vv * m).array() < 0.0).all(), "v(rho)^T A+(rho) is not negative at " + point_text(pt));
        }
    } else if (const auto* sc = std::get_if<StructuralCertificate>(&report.certificate)) {
        const auto sys = system_for(sc->reduced);
        const bool symbolic = sc->route == "orthant";
        const auto an = assemble_matrix(sys, structural_rates(symbolic));
        Assignment ones;
        for (const auto& v : an.variables()) ones[v] = 1.0;
        const Eigen::MatrixXd a1 = eval_matrix(an, ones);
        chk.require(a1.rows() == sc->a_one.rows() && max_abs(a1 - sc->a_one) == 0.0, "stored A_1 does not match");
        chk.require(max_real_eigenvalue(a1) < 0.0, "A_1 is not Hurwitz");
        std::vector<Assignment> points{ones};
        if (symbolic) {
            chk.require(sc->det.has_value(), "orthant certificate without its determinant");
            std::mt19937_64 rng(splitmix64(opts.seed ^ kRecheckSalt));
            for (int s = 0; s < opts.recheck_points; ++s) points.push_back(orthant_sample(rng, an.variables()));
        }
        for (const auto& pt : points) {
            const Eigen::MatrixXd m = eval_matrix(an, pt);
            if (symbolic && sc->det) chk.require(sc->det->eval(pt) > 0.0, "(-1)^d det is not positive at " + point_text(pt));
            chk.require(acyclic(coupling_numeric(sys, m).support), "catalytic coupling has a cycle at " + point_text(pt));
        }
    } else {
        chk.require(false, "certified report without a certificate");
    }
    return chk.result;
}

// ---------------------------------------------------------------------------
// Antithetic integral control
// ---------------------------------------------------------------------------

ControllerReport controller_feasibility(const ReactionNetwork& net, const ControllerSpec& spec,
                                        const AnalysisOptions& opts) {
    require_valid(net);
    const auto d = net.num_species();
    if (spec.controlled >= d || spec.actuated >= d)
        throw ContractViolation("controlled and actuated species indices must be < " + std::to_string(d));
    if (!(spec.mu > 0 && spec.theta > 0 && spec.eta > 0 && spec.k > 0))
        throw ContractViolation("controller gains mu, theta, eta, k must be positive");
    if (net.has_bimolecular()) throw WrongMode("the controller check needs a network without bimolecular reactions");
    Assignment point;
    for (const auto& r : net.reactions()) {
        const auto& p = net.param(r.rate);
        const auto v = p.point_value();
        if (!v) throw WrongMode("the controller check needs fixed rates; '" + p.name + "' is not fixed");
        point[p.name] = *v;
    }

    ControllerReport rep;
    rep.a = eval_matrix(characteristic_matrix(net), point);
    rep.b0 = eval_matrix(offset_vector(net), point).col(0);
    const auto h = is_hurwitz_metzler(rep.a, opts.tolerances);
    if (h.verdict != Stability::Stable)
        throw PrerequisiteFailed("A is not Hurwitz (lambda_PF = " + num(h.lambda_pf) + "), so the open loop is not ergodic");

    // w^T A = -e_l^T  <=>  A^T w = -e_l, solved exactly.
    const auto inv_t = inverse(RationalMatrix::from_double(rep.a).transpose());
    std::vector<Rational> w(d);
    bool nonneg = true;
    for (std::size_t i = 0; i < d; ++i) {
        w[i] = -inv_t(i, spec.controlled);
        nonneg = nonneg && w[i] >= 0;
    }
    rep.w.resize(ix(d));
    for (std::size_t i = 0; i < d; ++i) rep.w(ix(i)) = w[i].convert_to<double>();
    rep.output_controllable = nonneg && w[spec.actuated] > 0;

    // v = -A^{-T} 1 gives v^T A = -1^T; the minimum-sum LP certificate sits on
    // the margin and would make c ~ epsilon. Scaled so that min v = 1.
    rep.v.resize(ix(d));
    for (std::size_t i = 0; i < d; ++i) {
        Rational s = 0;
        for (std::size_t j = 0; j < d; ++j) s -= inv_t(i, j);
        rep.v(ix(i)) = s.convert_to<double>();
    }
    rep.v /= rep.v.minCoeff();
    const Eigen::RowVectorXd va = rep.v.transpose() * rep.a;
    rep.c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) rep.c = std::min(rep.c, -va(ix(i)) / rep.v(ix(i)));
    rep.setpoint_lower_bound = rep.v.dot(rep.b0) / (rep.c * rep.v(ix(spec.controlled)));
    rep.requested_setpoint = spec.mu / spec.theta;
    rep.feasible = rep.output_controllable && rep.requested_setpoint > rep.setpoint_lower_bound;
    rep.notes.emplace_back("the set-point bound uses the certificate v = -A^{-T} 1 and is not claimed to be the tightest");
    rep.notes.emplace_back(kIrreducibility);
    if (!rep.output_controllable)
        rep.notes.emplace_back("w = -A^{-T} e_l is not nonnegative with a positive actuated entry: not output controllable");
    return rep;
}

}  // namespace crnerg
