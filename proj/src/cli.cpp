#include "crnerg/cli.hpp"

#include <cstdlib>
#include <ios>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crnerg/error.hpp"
#include "crnerg/ergodicity.hpp"
#include "crnerg/netparse.hpp"
#include "crnerg/report.hpp"
#include "crnerg/ssa.hpp"

namespace crnerg {

namespace {

using nlohmann::json;

struct Flags {
    std::string file;
    std::string format = "json";
    std::string mode = "auto";
    double epsilon = 1e-7;
    std::uint64_t seed = 1;
    int degree = -1;
    int spot_checks = 50;
    int recheck = 100;
    int nilpotency_samples = 20;
    int multistart = 512;
    std::size_t vertex_limit = 20;
    bool serial = false;
    bool no_verify = false;
    // controller
    std::string target;
    std::string actuated;
    double mu = 1, theta = 1, eta = 1, k = 1;
    // simulate
    double t_end = 0;
    std::string x0;
    std::size_t runs = 1;
    double burn_in = 0.5;
    std::string controller;
};

const char* paint(bool color, Verdict v) {
    if (!color) return "";
    switch (v) {
        case Verdict::Certified: return "\033[32m";
        case Verdict::Refuted: return "\033[31m";
        case Verdict::Inconclusive: return "\033[33m";
    }
    return "";
}

AnalysisMode parse_mode(const std::string& s, const ReactionNetwork& net) {
    if (s == "auto") return auto_mode(net);
    if (s == "nominal") return AnalysisMode::Nominal;
    if (s == "robust") return AnalysisMode::RobustParametric;
    if (s == "robust-constv") return AnalysisMode::RobustConstantV;
    if (s == "structural") return AnalysisMode::Structural;
    return AnalysisMode::Bimolecular;
}

AnalysisOptions options(const Flags& f) {
    AnalysisOptions o;
    o.tolerances.epsilon = f.epsilon;
    o.seed = f.seed;
    o.handelman_degree = f.degree;
    o.spot_checks = f.spot_checks;
    o.recheck_points = f.recheck;
    o.nilpotency_samples = f.nilpotency_samples;
    o.multistart = f.multistart;
    o.vertex_limit = f.vertex_limit;
    o.parallel = !f.serial;
    return o;
}

std::size_t species_or_throw(const ReactionNetwork& net, const std::string& name) {
    const auto i = net.species_index(name);
    if (!i) throw ContractViolation("unknown species '" + name + "'");
    return *i;
}

std::string complex_text(const ReactionNetwork& net, const Complex& c) {
    if (c.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += " + ";
        if (c[i].multiplicity != 1) s += std::to_string(c[i].multiplicity) + " ";
        s += net.species()[c[i].species];
    }
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

double to_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ContractViolation("invalid number '" + s + "' in " + what);
    return v;
}

int cmd_analyze(const Flags& f, const ReactionNetwork& net, std::ostream& out, bool color) {
    const auto opts = options(f);
    const auto rep = analyze(net, parse_mode(f.mode, net), opts);
    std::optional<CheckResult> check;
    if (!f.no_verify && rep.verdict != Verdict::Inconclusive) check = verify_report(net, rep, opts);
    if (f.format == "json") {
        auto j = to_json(rep);
        if (check) j["verification"] = {{"ok", check->ok}, {"problems", check->problems}};
        out << j.dump(2) << "\n";
    } else {
        auto text = to_text(rep);
        const std::string tag = std::string("verdict: ") + to_string(rep.verdict);
        if (color) {
            const auto at = text.find(tag);
            if (at != std::string::npos)
                text.replace(at, tag.size(), std::string("verdict: ") + paint(color, rep.verdict) +
                                                 to_string(rep.verdict) + "\033[0m");
        }
        out << text;
        if (check) {
            out << "independent recheck: " << (check->ok ? "passed" : "FAILED") << "\n";
            for (const auto& p : check->problems) out << "  " << p << "\n";
        }
    }
    if (check && !check->ok) throw NumericalInconsistency("independent recheck rejected the report");
    switch (rep.verdict) {
        case Verdict::Certified: return kExitOk;
        case Verdict::Refuted: return kExitRefuted;
        case Verdict::Inconclusive: return kExitInconclusive;
    }
    return kExitInternal;
}

int cmd_classify(const Flags& f, const ReactionNetwork& net, std::ostream& out) {
    const auto uni = classify_unimolecular(net);
    std::map<std::string, int> counts{{"zeroth", 0}, {"dg", 0}, {"ct", 0}, {"cv", 0}, {"bimolecular", 0}};
    json rows = json::array();
    for (std::size_t r = 0; r < net.num_reactions(); ++r) {
        const auto& rx = net.reactions()[r];
        std::string cls;
        switch (rx.order()) {
            case 0: cls = "zeroth"; break;
            case 1: {
                const auto k = *uni.kind_of(r);
                cls = k == UniKind::Degradation ? "dg" : k == UniKind::Catalytic ? "ct" : "cv";
                break;
            }
            default: cls = "bimolecular";
        }
        ++counts[cls];
        rows.push_back({{"index", r},
                        {"reaction", complex_text(net, rx.reactants) + " -> " + complex_text(net, rx.products)},
                        {"rate", rx.rate},
                        {"class", cls}});
    }
    if (f.format == "json") {
        out << json{{"reactions", rows}, {"counts", counts}}.dump(2) << "\n";
    } else {
        for (const auto& r : rows)
            out << r["index"].get<std::size_t>() << "\t" << r["class"].get<std::string>() << "\t"
                << r["reaction"].get<std::string>() << " @ " << r["rate"].get<std::string>() << "\n";
        out << "counts:";
        for (const auto& [k, v] : counts) out << " " << k << "=" << v;
        out << "\n";
    }
    return kExitOk;
}

ControllerSpec controller_spec(const ReactionNetwork& net, const std::string& target, const std::string& actuated,
                               double mu, double theta, double eta, double k) {
    ControllerSpec s;
    s.controlled = species_or_throw(net, target);
    s.actuated = actuated.empty() ? 0 : species_or_throw(net, actuated);
    s.mu = mu;
    s.theta = theta;
    s.eta = eta;
    s.k = k;
    return s;
}

int cmd_controller(const Flags& f, const ReactionNetwork& net, std::ostream& out) {
    const auto spec = controller_spec(net, f.target, f.actuated, f.mu, f.theta, f.eta, f.k);
    const auto rep = controller_feasibility(net, spec, options(f));
    if (f.format == "json")
        out << to_json(rep, net, spec).dump(2) << "\n";
    else
        out << to_text(rep, net, spec);
    return rep.feasible ? kExitOk : kExitRefuted;
}

int cmd_simulate(const Flags& f, const ReactionNetwork& input, std::ostream& out) {
    ReactionNetwork net = input;
    std::vector<std::string> notes;
    std::optional<ControllerSpec> spec;
    if (!f.controller.empty()) {
        const auto parts = split(f.controller, ',');
        if (parts.size() != 5) throw ContractViolation("--controller expects target,mu,theta,eta,k");
        spec = controller_spec(input, parts[0], f.actuated, to_number(parts[1], "--controller"),
                               to_number(parts[2], "--controller"), to_number(parts[3], "--controller"),
                               to_number(parts[4], "--controller"));
        auto cl = augment_antithetic(input, *spec);
        net = std::move(cl.network);
        notes = std::move(cl.notes);
    }
    State x0(net.num_species(), 0);
    if (!f.x0.empty()) {
        const auto parts = split(f.x0, ',');
        if (parts.size() != input.num_species() && parts.size() != net.num_species())
            throw ContractViolation("--x0 needs " + std::to_string(input.num_species()) + " entries");
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const double v = to_number(parts[i], "--x0");
            if (v < 0 || v != static_cast<double>(static_cast<std::int64_t>(v)))
                throw ContractViolation("--x0 entries must be nonnegative integers");
            x0[i] = static_cast<std::int64_t>(v);
        }
    }
    if (f.format == "csv") {
        write_csv(out, net, simulate(net, x0, f.t_end, run_seed(f.seed, 0)));
        return kExitOk;
    }
    const auto est = stationary_mean(net, x0, f.t_end, f.burn_in, f.runs, f.seed, !f.serial);
    auto j = to_json(est, net);
    j["notes"] = notes;
    if (spec) {
        j["controller"] = {{"controlled", input.species()[spec->controlled]},
                           {"actuated", input.species()[spec->actuated]},
                           {"setpoint", spec->mu / spec->theta}};
    }
    out << j.dump(2) << "\n";
    return kExitOk;
}

void add_common(CLI::App* sub, Flags& f, bool with_format_csv) {
    sub->add_option("file", f.file, "network file (.crn), or - for standard input")->required();
    auto* fmt = sub->add_option("--format", f.format, "output format");
    if (with_format_csv)
        fmt->check(CLI::IsMember({"json", "csv"}));
    else
        fmt->check(CLI::IsMember({"json", "text"}));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, bool color) {
    if (std::getenv("NO_COLOR") != nullptr) color = false;
    Flags f;
    CLI::App app{"Ergodicity certificates for stochastic reaction networks", "crnerg"};
    app.require_subcommand(1);

    auto* analyze_cmd = app.add_subcommand("analyze", "certify or refute ergodicity");
    add_common(analyze_cmd, f, false);
    analyze_cmd->add_option("--mode", f.mode, "analysis mode")
        ->check(CLI::IsMember({"nominal", "robust", "robust-constv", "structural", "bimolecular", "auto"}));
    analyze_cmd->add_option("--epsilon", f.epsilon, "strict margin of the LP certificate")->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--seed", f.seed, "seed of every randomized step");
    analyze_cmd->add_option("--degree", f.degree, "Handelman degree (-1: max(deg, 2))");
    analyze_cmd->add_option("--spot-checks", f.spot_checks, "sample points for polynomial certificates")
        ->check(CLI::NonNegativeNumber);
    analyze_cmd->add_option("--recheck", f.recheck, "fresh points for the independent recheck")
        ->check(CLI::NonNegativeNumber);
    analyze_cmd->add_option("--nilpotency-samples", f.nilpotency_samples, "orthant points of the structural fallback")
        ->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--multistart", f.multistart, "starts of the counterexample search")
        ->check(CLI::NonNegativeNumber);
    analyze_cmd->add_option("--vertex-limit", f.vertex_limit, "largest conversion-parameter count for vertex LPs");
    analyze_cmd->add_flag("--serial", f.serial, "use the serial reference kernels");
    analyze_cmd->add_flag("--no-verify", f.no_verify, "skip the independent recheck");

    auto* classify_cmd = app.add_subcommand("classify", "classify reactions by order and first-order class");
    add_common(classify_cmd, f, false);

    auto* controller_cmd = app.add_subcommand("controller", "antithetic integral controller feasibility");
    add_common(controller_cmd, f, false);
    controller_cmd->add_option("--target", f.target, "controlled species")->required();
    controller_cmd->add_option("--actuated", f.actuated, "actuated species (default: first species)");
    controller_cmd->add_option("--mu", f.mu, "reference rate")->check(CLI::PositiveNumber);
    controller_cmd->add_option("--theta", f.theta, "sensing rate")->check(CLI::PositiveNumber);
    controller_cmd->add_option("--eta", f.eta, "annihilation rate")->check(CLI::PositiveNumber);
    controller_cmd->add_option("--k", f.k, "actuation rate")->check(CLI::PositiveNumber);
    controller_cmd->add_option("--epsilon", f.epsilon, "strict margin")->check(CLI::PositiveNumber);

    auto* simulate_cmd = app.add_subcommand("simulate", "Gillespie simulation and stationary means");
    add_common(simulate_cmd, f, true);
    simulate_cmd->add_option("--t-end", f.t_end, "final time")->required()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--x0", f.x0, "initial counts, comma separated (default zeros)");
    simulate_cmd->add_option("--runs", f.runs, "independent runs")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", f.seed, "ensemble seed");
    simulate_cmd->add_option("--burn-in", f.burn_in, "discarded fraction of [0, t_end]")->check(CLI::Range(0.0, 0.999999));
    simulate_cmd->add_option("--controller", f.controller, "target,mu,theta,eta,k: add antithetic feedback");
    simulate_cmd->add_option("--actuated", f.actuated, "actuated species (default: first species)");
    simulate_cmd->add_flag("--serial", f.serial, "use the serial reference kernel");

    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "crnerg: " << e.what() << "\n";
        if (e.get_exit_code() == 0) return kExitOk;
        return kExitUsage;
    }

    try {
        const auto doc = parse_document(read_source(f.file));
        const auto& net = doc.network;
        if (analyze_cmd->parsed()) return cmd_analyze(f, net, out, color);
        if (classify_cmd->parsed()) return cmd_classify(f, net, out);
        if (controller_cmd->parsed()) return cmd_controller(f, net, out);
        return cmd_simulate(f, net, out);
    } catch (const std::ios_base::failure& e) {
        err << "crnerg: " << e.what() << "\n";
        return kExitNoInput;
    } catch (const ParseError& e) {
        err << "crnerg: " << f.file << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const ContractViolation& e) {
        err << "crnerg: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalInconsistency& e) {
        err << "crnerg: internal inconsistency: " << e.what() << "\n";
        return kExitInternal;
    } catch (const Error& e) {
        err << "crnerg: " << e.what() << "\n";
        return kExitPrerequisite;
    } catch (const std::exception& e) {
        err << "crnerg: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace crnerg
