#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "crnerg/ergodicity.hpp"
#include "crnerg/network.hpp"

namespace crnerg {

using State = std::vector<std::int64_t>;

/// Largest allowed molecule count; exceeding it raises SimulationOverflow.
inline constexpr std::int64_t kMaxCount = std::int64_t{1} << 31;

/// Jump path of the Markov chain. times[0] = 0 holds x0; every later entry is
/// a jump, with `reactions[i - 1]` the reaction that produced states[i].
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<std::size_t> reactions;
    double t_end = 0.0;
};

struct ClosedLoop {
    ReactionNetwork network;
    std::size_t z1 = 0;
    std::size_t z2 = 0;
    std::vector<std::string> notes;
};

/// Appends Z1, Z2 and the controller reactions
///   0 -> Z1 @ mu,  X_l -> X_l + Z2 @ theta,  Z1 + Z2 -> 0 @ eta,  Z1 -> Z1 + X_act @ k.
/// Names already in use get a numeric suffix, recorded in `notes`.
ClosedLoop augment_antithetic(const ReactionNetwork& net, const ControllerSpec& spec);

/// Called for each holding interval [t0, t1) with the state held on it.
using HoldingObserver = std::function<void(double t0, double t1, const State& x)>;

/// Gillespie direct method. The observer sees every interval up to t_end;
/// returns the number of jumps. Requires fixed rates.
std::size_t simulate_observed(const ReactionNetwork& net, const State& x0, double t_end, std::uint64_t seed,
                              const HoldingObserver& observer);

/// Full trajectory (direct method). Identical seeds give identical paths.
Trajectory simulate(const ReactionNetwork& net, const State& x0, double t_end, std::uint64_t seed);

struct StationaryEstimate {
    /// Time-averaged means over [burn_in * t_end, t_end], averaged over runs.
    std::vector<double> mean;
    /// Standard error of the mean across runs (0 for a single run).
    std::vector<double> std_error;
    /// Per-run time averages, one row per run.
    std::vector<std::vector<double>> per_run;
    std::size_t runs = 0;
    double t_end = 0.0;
    double burn_in = 0.0;
    std::uint64_t seed = 0;
    std::size_t jumps = 0;
};

/// Seed of run `index` derived from the ensemble seed.
std::uint64_t run_seed(std::uint64_t seed, std::size_t index);

/// Serial reference kernel.
StationaryEstimate stationary_mean_serial(const ReactionNetwork& net, const State& x0, double t_end, double burn_in,
                                          std::size_t runs, std::uint64_t seed);
/// Runs distributed over OpenMP threads; bitwise identical to the serial kernel.
StationaryEstimate stationary_mean_parallel(const ReactionNetwork& net, const State& x0, double t_end, double burn_in,
                                            std::size_t runs, std::uint64_t seed);
StationaryEstimate stationary_mean(const ReactionNetwork& net, const State& x0, double t_end, double burn_in,
                                   std::size_t runs, std::uint64_t seed, bool parallel = true);

/// `t,species1,...,speciesd` rows at the jump times.
void write_csv(std::ostream& os, const ReactionNetwork& net, const Trajectory& traj);

nlohmann::json to_json(const StationaryEstimate& est, const ReactionNetwork& net);

}  // namespace crnerg
