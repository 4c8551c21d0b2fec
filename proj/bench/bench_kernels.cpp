// Serial reference kernels against their OpenMP counterparts.
#include <random>

#include <benchmark/benchmark.h>

#include "crnerg/netparse.hpp"
#include "crnerg/param_matrix.hpp"
#include "crnerg/positivity.hpp"
#include "crnerg/ssa.hpp"

using namespace crnerg;

namespace {

/// (-1)^d det of a random 6x6 affine Metzler matrix in four parameters.
struct DetProblem {
    MultiPoly p;
    Box box;
};

const DetProblem& det_problem() {
    static const DetProblem prob = [] {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const std::vector<std::string> vars{"a", "b", "c", "e"};
        const std::size_t d = 6;
        ParamMatrix m(d, d, vars);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                const double sign = i == j ? -1.0 : 1.0;
                m.add(i, j, sign * (i == j ? 2.0 : u(rng)));
                if (rng() % 2 == 0) m.add(i, j, sign * u(rng), vars[rng() % vars.size()]);
            }
        DetProblem out{det_poly(m), {}};
        for (const auto& v : vars) out.box[v] = Interval{0.1, 5.0};
        return out;
    }();
    return prob;
}

const ReactionNetwork& closed_loop() {
    static const ReactionNetwork net = [] {
        const auto open = parse_network(
            "species: mRNA, Protein\nparam k2 = 1\nparam g1 = 1\nparam g2 = 1\n"
            "reaction: mRNA -> mRNA + Protein @ k2\nreaction: mRNA -> 0 @ g1\nreaction: Protein -> 0 @ g2\n");
        ControllerSpec spec;
        spec.controlled = 1;
        spec.actuated = 0;
        spec.mu = 3;
        spec.eta = 50;
        return augment_antithetic(open, spec).network;
    }();
    return net;
}

void BM_MultistartSerial(benchmark::State& state) {
    const auto& prob = det_problem();
    for (auto _ : state)
        benchmark::DoNotOptimize(minimize_on_box_serial(prob.p, prob.box, static_cast<int>(state.range(0))));
}

void BM_MultistartParallel(benchmark::State& state) {
    const auto& prob = det_problem();
    for (auto _ : state)
        benchmark::DoNotOptimize(minimize_on_box_parallel(prob.p, prob.box, static_cast<int>(state.range(0))));
}

void BM_StationaryMeanSerial(benchmark::State& state) {
    const auto& net = closed_loop();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            stationary_mean_serial(net, State(4, 0), 100.0, 0.5, static_cast<std::size_t>(state.range(0)), 1));
}

void BM_StationaryMeanParallel(benchmark::State& state) {
    const auto& net = closed_loop();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            stationary_mean_parallel(net, State(4, 0), 100.0, 0.5, static_cast<std::size_t>(state.range(0)), 1));
}

}  // namespace

BENCHMARK(BM_MultistartSerial)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultistartParallel)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StationaryMeanSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StationaryMeanParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
