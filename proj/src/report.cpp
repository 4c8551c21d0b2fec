#include "crnerg/report.hpp"

#include <sstream>

namespace crnerg {

using nlohmann::json;

json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

json vec(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json assignment(const Assignment& a) {
    json out = json::object();
    for (const auto& [k, v] : a) out[k] = v;
    return out;
}

json handelman(const HandelmanCertificate& h) {
    json products = json::array();
    for (const auto& p : h.products) products.push_back({{"a", p.a}, {"b", p.b}, {"coeff", p.coeff}});
    json bounds = json::array();
    for (const auto& b : h.bounds) bounds.push_back({b.lo, b.hi});
    return {{"degree", h.degree},       {"delta", h.delta},    {"variables", h.variables},
            {"bounds", bounds},         {"products", products}};
}

json certificate(const Certificate& c) {
    if (const auto* v = std::get_if<VectorCertificate>(&c)) {
        json points = json::array(), mats = json::array();
        for (const auto& p : v->points) points.push_back(assignment(p));
        for (const auto& m : v->matrices) mats.push_back(to_json(m));
        return {{"type", "vector"},
                {"data",
                 {{"v", vec(v->v)},
                  {"matrix", v->matrix},
                  {"points", points},
                  {"matrices", mats},
                  {"with_sb", v->with_sb},
                  {"reduced", v->reduced}}}};
    }
    if (const auto* p = std::get_if<PolynomialCertificate>(&c)) {
        json polys = json::array();
        for (const auto& q : p->v) polys.push_back(to_json(q));
        json box = json::object();
        for (const auto& [k, iv] : p->box) box[k] = {iv.lo, iv.hi};
        json data = {{"v", polys},
                     {"det", to_json(p->det)},
                     {"box", box},
                     {"positivity_method", p->positivity_method},
                     {"anchor", assignment(p->anchor)},
                     {"anchor_lambda_pf", p->anchor_lambda},
                     {"reduced", p->reduced}};
        data["handelman"] = p->handelman ? handelman(*p->handelman) : json(nullptr);
        return {{"type", "polynomial"}, {"data", data}};
    }
    if (const auto* s = std::get_if<StructuralCertificate>(&c)) {
        json data = {{"route", s->route}, {"a_one", to_json(s->a_one)}, {"lambda_pf", s->lambda_pf},
                     {"coupling", to_json(s->coupling)}, {"nilpotent", s->nilpotent}, {"cycle", s->cycle},
                     {"radius", s->radius}, {"samples", s->samples}, {"reduced", s->reduced}};
        if (s->det) {
            data["det"] = to_json(*s->det);
            data["det_method"] = s->det_method;
        }
        return {{"type", "structural"}, {"data", data}};
    }
    return nullptr;
}

json reduction(const Reduction& r) {
    Eigen::MatrixXd perp = r.sb_perp.cast<double>();
    return {{"sb_perp", to_json(perp)},
            {"rows", r.row_labels},
            {"kept", r.kept},
            {"dropped", r.dropped},
            {"exact", r.exact}};
}

std::string matrix_text(const Eigen::MatrixXd& m, const std::string& indent) {
    std::ostringstream os;
    os.precision(6);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << indent << "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
        os << "]\n";
    }
    return os.str();
}

}  // namespace

json to_json(const MultiPoly& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"exponent", e}, {"coeff", c}});
    return {{"variables", p.variables()}, {"terms", terms}, {"text", p.to_string()}};
}

json to_json(const ErgodicityReport& r) {
    json out = {{"mode", to_string(r.mode)},
                {"verdict", to_string(r.verdict)},
                {"reason", r.reason},
                {"certificate", certificate(r.certificate)}};
    if (r.counterexample) {
        out["counterexample"] = assignment(*r.counterexample);
        out["counterexample_lambda_pf"] = r.counterexample_lambda ? json(*r.counterexample_lambda) : json(nullptr);
    }
    if (r.reduction) out["reduction"] = reduction(*r.reduction);
    out["notes"] = r.notes;
    const auto& d = r.diagnostics;
    out["diagnostics"] = {{"seed", d.seed},
                          {"tolerances", {{"epsilon", d.tolerances.epsilon}, {"marginal", d.tolerances.marginal}}},
                          {"handelman_degree", d.handelman_degree},
                          {"spot_checks", d.spot_checks},
                          {"recheck_points", d.recheck_points},
                          {"nilpotency_samples", d.nilpotency_samples},
                          {"multistart", d.multistart},
                          {"wall_time_ms", d.wall_time_ms}};
    return out;
}

json to_json(const ControllerReport& r, const ReactionNetwork& net, const ControllerSpec& spec) {
    return {{"controlled", net.species()[spec.controlled]},
            {"actuated", net.species()[spec.actuated]},
            {"gains", {{"mu", spec.mu}, {"theta", spec.theta}, {"eta", spec.eta}, {"k", spec.k}}},
            {"a", to_json(r.a)},
            {"b0", vec(r.b0)},
            {"w", vec(r.w)},
            {"output_controllable", r.output_controllable},
            {"v", vec(r.v)},
            {"c", r.c},
            {"setpoint_lower_bound", r.setpoint_lower_bound},
            {"requested_setpoint", r.requested_setpoint},
            {"feasible", r.feasible},
            {"notes", r.notes}};
}

std::string to_text(const ErgodicityReport& r) {
    std::ostringstream os;
    os.precision(6);
    os << "mode:    " << to_string(r.mode) << "\n";
    os << "verdict: " << to_string(r.verdict) << "\n";
    os << "reason:  " << r.reason << "\n";
    if (r.reduction) {
        os << "reduction (" << (r.reduction->exact ? "exact" : "sufficient only") << "):";
        for (const auto& l : r.reduction->row_labels) os << " " << l;
        os << "\n";
    }
    if (const auto* v = std::get_if<VectorCertificate>(&r.certificate)) {
        os << "certificate v (" << v->matrix << ", " << v->points.size() << " point(s)):";
        for (Eigen::Index i = 0; i < v->v.size(); ++i) os << " " << v->v(i);
        os << "\n";
    } else if (const auto* p = std::get_if<PolynomialCertificate>(&r.certificate)) {
        os << "(-1)^d det A+: " << p->det.to_string() << " (" << p->positivity_method << ")\n";
        os << "certificate v(rho):\n";
        for (const auto& q : p->v) os << "  " << q.to_string() << "\n";
    } else if (const auto* s = std::get_if<StructuralCertificate>(&r.certificate)) {
        os << "A_1 (lambda_PF = " << s->lambda_pf << "):\n" << matrix_text(s->a_one, "  ");
        if (s->coupling.size() > 0) os << "catalytic coupling:\n" << matrix_text(s->coupling, "  ");
        os << "nilpotent: " << (s->nilpotent ? "yes" : "no");
        if (!s->nilpotent) os << " (spectral radius " << s->radius << ")";
        os << "\n";
    }
    if (r.counterexample) {
        os << "counterexample:";
        for (const auto& [k, v] : *r.counterexample) os << " " << k << "=" << v;
        if (r.counterexample_lambda) os << " (lambda_PF = " << *r.counterexample_lambda << ")";
        os << "\n";
    }
    for (const auto& n : r.notes) os << "note: " << n << "\n";
    return os.str();
}

std::string to_text(const ControllerReport& r, const ReactionNetwork& net, const ControllerSpec& spec) {
    std::ostringstream os;
    os.precision(6);
    os << "controlled: " << net.species()[spec.controlled] << ", actuated: " << net.species()[spec.actuated] << "\n";
    os << "w:";
    for (Eigen::Index i = 0; i < r.w.size(); ++i) os << " " << r.w(i);
    os << "\noutput controllable: " << (r.output_controllable ? "yes" : "no") << "\n";
    os << "v:";
    for (Eigen::Index i = 0; i < r.v.size(); ++i) os << " " << r.v(i);
    os << "\nc: " << r.c << "\n";
    os << "set point mu/theta = " << r.requested_setpoint << ", lower bound " << r.setpoint_lower_bound << "\n";
    os << "verdict: " << (r.feasible ? "feasible" : "infeasible") << "\n";
    for (const auto& n : r.notes) os << "note: " << n << "\n";
    return os.str();
}

}  // namespace crnerg
