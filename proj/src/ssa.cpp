#include "crnerg/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "crnerg/error.hpp"
#include "crnerg/positivity.hpp"

namespace crnerg {

namespace {

/// Unique name: `base`, else base_2, base_3, ...
std::string fresh_name(const std::string& base, const std::function<bool(const std::string&)>& taken) {
    if (!taken(base)) return base;
    for (int k = 2;; ++k) {
        const auto name = base + "_" + std::to_string(k);
        if (!taken(name)) return name;
    }
}

struct CompiledReaction {
    double rate = 0.0;
    std::vector<ComplexTerm> reactants;
    std::vector<std::pair<std::size_t, int>> delta;
};

std::vector<CompiledReaction> compile(const ReactionNetwork& net) {
    require_valid(net);
    std::vector<CompiledReaction> out;
    const auto d = net.num_species();
    for (const auto& r : net.reactions()) {
        const auto& p = net.param(r.rate);
        const auto v = p.point_value();
        if (!v) throw WrongMode("simulation needs fixed rates; '" + p.name + "' is not fixed");
        CompiledReaction c;
        c.rate = *v;
        c.reactants = r.reactants;
        const auto z = r.stoichiometry(d);
        for (std::size_t i = 0; i < d; ++i)
            if (z[i] != 0) c.delta.emplace_back(i, z[i]);
        out.push_back(std::move(c));
    }
    return out;
}

/// Mass-action propensity rate * prod x!/(x - m)!.
double propensity(const CompiledReaction& r, const State& x) {
    double a = r.rate;
    for (const auto& t : r.reactants)
        for (int k = 0; k < t.multiplicity; ++k) a *= static_cast<double>(std::max<std::int64_t>(x[t.species] - k, 0));
    return a;
}

/// Uniform in [0, 1) with 53 random bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_inputs(const ReactionNetwork& net, const State& x0, double t_end) {
    if (x0.size() != net.num_species())
        throw ContractViolation("x0 has " + std::to_string(x0.size()) + " entries for " +
                                std::to_string(net.num_species()) + " species");
    if (std::any_of(x0.begin(), x0.end(), [](std::int64_t v) { return v < 0; }))
        throw ContractViolation("x0 must be nonnegative");
    if (!(t_end > 0.0)) throw ContractViolation("t_end must be positive");
}

using JumpObserver = std::function<void(double t, std::size_t reaction, const State& x)>;

std::size_t run_chain(const ReactionNetwork& net, const State& x0, double t_end, std::uint64_t seed,
                      const HoldingObserver& observer, const JumpObserver& on_jump) {
    check_inputs(net, x0, t_end);
    const auto reactions = compile(net);
    std::mt19937_64 rng(seed);
    std::vector<double> a(reactions.size());
    State x = x0;
    double t = 0.0;
    std::size_t jumps = 0;
    for (;;) {
        double a0 = 0.0;
        for (std::size_t k = 0; k < reactions.size(); ++k) {
            a[k] = propensity(reactions[k], x);
            a0 += a[k];
        }
        if (a0 <= 0.0) break;
        const double tau = -std::log1p(-unit(rng)) / a0;
        if (t + tau >= t_end) break;
        observer(t, t + tau, x);
        t += tau;
        const double target = unit(rng) * a0;
        double cum = 0.0;
        std::size_t pick = reactions.size();
        for (std::size_t k = 0; k < reactions.size(); ++k) {
            if (a[k] <= 0.0) continue;
            pick = k;
            cum += a[k];
            if (cum > target) break;
        }
        for (const auto& [i, dz] : reactions[pick].delta) {
            x[i] += dz;
            if (x[i] > kMaxCount)
                throw SimulationOverflow("species " + net.species()[i] + " exceeded 2^31 molecules at t = " +
                                         std::to_string(t));
        }
        ++jumps;
        if (on_jump) on_jump(t, pick, x);
    }
    observer(t, t_end, x);
    return jumps;
}

/// Kahan-compensated accumulator.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

struct RunResult {
    std::vector<double> mean;
    std::size_t jumps = 0;
};

RunResult one_run(const ReactionNetwork& net, const State& x0, double t_end, double burn_in, std::uint64_t seed) {
    const auto d = net.num_species();
    const double t0 = burn_in * t_end;
    const double window = t_end - t0;
    std::vector<Kahan> acc(d);
    RunResult r;
    r.jumps = simulate_observed(net, x0, t_end, seed, [&](double a, double b, const State& x) {
        const double lo = std::max(a, t0);
        if (b <= lo) return;
        const double w = (b - lo) / window;
        for (std::size_t i = 0; i < d; ++i) acc[i].add(static_cast<double>(x[i]) * w);
    });
    r.mean.resize(d);
    for (std::size_t i = 0; i < d; ++i) r.mean[i] = acc[i].sum;
    return r;
}

void check_ensemble(double burn_in, std::size_t runs) {
    if (!(burn_in >= 0.0 && burn_in < 1.0)) throw ContractViolation("burn-in fraction must lie in [0, 1)");
    if (runs == 0) throw ContractViolation("at least one run is required");
}

/// Pools per-run means in index order, so the result does not depend on
/// how the runs were scheduled.
StationaryEstimate pool(std::vector<RunResult> results, std::size_t d, double t_end, double burn_in, std::uint64_t seed) {
    StationaryEstimate est;
    est.runs = results.size();
    est.t_end = t_end;
    est.burn_in = burn_in;
    est.seed = seed;
    est.mean.assign(d, 0.0);
    est.std_error.assign(d, 0.0);
    const double n = static_cast<double>(est.runs);
    for (std::size_t i = 0; i < d; ++i) {
        Kahan s;
        for (const auto& r : results) s.add(r.mean[i]);
        est.mean[i] = s.sum / n;
        if (est.runs > 1) {
            Kahan q;
            for (const auto& r : results) q.add((r.mean[i] - est.mean[i]) * (r.mean[i] - est.mean[i]));
            est.std_error[i] = std::sqrt(q.sum / (n - 1.0) / n);
        }
    }
    for (auto& r : results) {
        est.jumps += r.jumps;
        est.per_run.push_back(std::move(r.mean));
    }
    return est;
}

}  // namespace

ClosedLoop augment_antithetic(const ReactionNetwork& net, const ControllerSpec& spec) {
    require_valid(net);
    const auto d = net.num_species();
    if (spec.controlled >= d || spec.actuated >= d)
        throw ContractViolation("controlled and actuated species indices must be < " + std::to_string(d));
    if (!(spec.mu > 0 && spec.theta > 0 && spec.eta > 0 && spec.k > 0))
        throw ContractViolation("controller gains mu, theta, eta, k must be positive");

    ClosedLoop out;
    out.network = net;
    auto& n = out.network;
    auto species_taken = [&n](const std::string& s) { return n.species_index(s).has_value(); };
    auto param_taken = [&n](const std::string& s) { return n.has_param(s); };
    auto add_species = [&](const std::string& base) {
        const auto name = fresh_name(base, species_taken);
        if (name != base) out.notes.push_back("species " + base + " exists; controller species renamed to " + name);
        return n.add_species(name);
    };
    auto add_param = [&](const std::string& base, double value) {
        const auto name = fresh_name(base, param_taken);
        if (name != base) out.notes.push_back("parameter " + base + " exists; controller parameter renamed to " + name);
        n.add_param({name, Fixed{value}});
        return name;
    };
    out.z1 = add_species("Z1");
    out.z2 = add_species("Z2");
    const auto mu = add_param("mu", spec.mu);
    const auto theta = add_param("theta", spec.theta);
    const auto eta = add_param("eta", spec.eta);
    const auto k = add_param("k", spec.k);
    const auto l = spec.controlled, act = spec.actuated;
    n.add_reaction({{}, {{out.z1, 1}}, mu});
    n.add_reaction({{{l, 1}}, normalize_complex({{l, 1}, {out.z2, 1}}), theta});
    n.add_reaction({normalize_complex({{out.z1, 1}, {out.z2, 1}}), {}, eta});
    n.add_reaction({{{out.z1, 1}}, normalize_complex({{out.z1, 1}, {act, 1}}), k});
    return out;
}

std::size_t simulate_observed(const ReactionNetwork& net, const State& x0, double t_end, std::uint64_t seed,
                              const HoldingObserver& observer) {
    return run_chain(net, x0, t_end, seed, observer, nullptr);
}

Trajectory simulate(const ReactionNetwork& net, const State& x0, double t_end, std::uint64_t seed) {
    Trajectory tr;
    tr.t_end = t_end;
    tr.times.push_back(0.0);
    tr.states.push_back(x0);
    run_chain(
        net, x0, t_end, seed, [](double, double, const State&) {},
        [&](double t, std::size_t k, const State& x) {
            tr.times.push_back(t);
            tr.states.push_back(x);
            tr.reactions.push_back(k);
        });
    return tr;
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t index) { return splitmix64(seed + index); }

StationaryEstimate stationary_mean_serial(const ReactionNetwork& net, const State& x0, double t_end, double burn_in,
                                          std::size_t runs, std::uint64_t seed) {
    check_ensemble(burn_in, runs);
    check_inputs(net, x0, t_end);
    std::vector<RunResult> results(runs);
    for (std::size_t r = 0; r < runs; ++r) results[r] = one_run(net, x0, t_end, burn_in, run_seed(seed, r));
    return pool(std::move(results), net.num_species(), t_end, burn_in, seed);
}

StationaryEstimate stationary_mean_parallel(const ReactionNetwork& net, const State& x0, double t_end, double burn_in,
                                            std::size_t runs, std::uint64_t seed) {
    check_ensemble(burn_in, runs);
    check_inputs(net, x0, t_end);
    compile(net);  // surface input errors before entering the parallel region
    std::vector<RunResult> results(runs);
    std::vector<std::string> errors(runs);
    const auto n = static_cast<std::int64_t>(runs);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < n; ++r) {
        const auto idx = static_cast<std::size_t>(r);
        try {
            results[idx] = one_run(net, x0, t_end, burn_in, run_seed(seed, idx));
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw SimulationOverflow(e);
    return pool(std::move(results), net.num_species(), t_end, burn_in, seed);
}

StationaryEstimate stationary_mean(const ReactionNetwork& net, const State& x0, double t_end, double burn_in,
                                   std::size_t runs, std::uint64_t seed, bool parallel) {
    return parallel ? stationary_mean_parallel(net, x0, t_end, burn_in, runs, seed)
                    : stationary_mean_serial(net, x0, t_end, burn_in, runs, seed);
}

void write_csv(std::ostream& os, const ReactionNetwork& net, const Trajectory& traj) {
    os << "t";
    for (const auto& s : net.species()) os << "," << s;
    os << "\n";
    os.precision(17);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        os << traj.times[k];
        for (auto v : traj.states[k]) os << "," << v;
        os << "\n";
    }
}

nlohmann::json to_json(const StationaryEstimate& est, const ReactionNetwork& net) {
    nlohmann::json mean = nlohmann::json::object(), se = nlohmann::json::object();
    for (std::size_t i = 0; i < net.num_species(); ++i) {
        mean[net.species()[i]] = est.mean[i];
        se[net.species()[i]] = est.std_error[i];
    }
    return {{"runs", est.runs}, {"t_end", est.t_end}, {"burn_in", est.burn_in}, {"seed", est.seed},
            {"jumps", est.jumps}, {"mean", mean},       {"std_error", se}};
}

}  // namespace crnerg
