#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "disagg/model.hpp"
#include "disagg/objective.hpp"
#include "disagg/pso.hpp"
#include "disagg/reconstruct.hpp"

namespace {

using namespace disagg;

Vec6 random_vec(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Vec6 v{};
    for (double& x : v) x = dist(rng);
    return v;
}

DeviceLibrary random_library(std::mt19937_64& rng, std::size_t devices, std::size_t tau) {
    DeviceLibrary library;
    for (std::size_t i = 0; i < devices; ++i) {
        DeviceProfile profile;
        profile.id = static_cast<int>(i);
        profile.steady_state = random_vec(rng, 10.0, 500.0);
        for (std::size_t t = 0; t < tau; ++t)
            profile.transient.push_back(random_vec(rng, 10.0, 600.0));
        library.profiles.push_back(std::move(profile));
    }
    return library;
}

StateChangeMatrix random_states(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                std::size_t events) {
    StateChangeMatrix states(rows, cols);
    std::uniform_int_distribution<std::size_t> row(0, rows - 1);
    std::uniform_int_distribution<std::size_t> col(0, cols - 1);
    std::bernoulli_distribution sign(0.5);
    for (std::size_t placed = 0; placed < events;) {
        const std::size_t t = row(rng);
        const std::size_t m = col(rng);
        if (states.at(t, m) != 0) continue;
        states.set(t, m, sign(rng) ? 1 : -1);
        ++placed;
    }
    return states;
}

void BM_ReconstructPower(benchmark::State& state) {
    const auto horizon = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(1);
    const DeviceLibrary library = random_library(rng, 3, 10);
    const StateChangeMatrix states = random_states(rng, horizon, 3,
                                                   std::min<std::size_t>(horizon / 5, 200));
    const ReconstructionContext ctx{library, horizon};

    for (auto _ : state) {
        PowerSeries out = reconstruct_power(states, ctx);
        benchmark::DoNotOptimize(out.samples.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(horizon));
}
BENCHMARK(BM_ReconstructPower)->Arg(60)->Arg(600)->Arg(86400);

void BM_ErrorOnInterval(benchmark::State& state) {
    const auto length = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(2);
    std::vector<Vec6> p(length);
    std::vector<Vec6> ps(length);
    for (std::size_t t = 0; t < length; ++t) {
        p[t] = random_vec(rng, 0.0, 1000.0);
        ps[t] = random_vec(rng, 0.0, 1000.0);
    }

    for (auto _ : state) {
        const double error = error_on_interval(p, ps, 0, length, {});
        benchmark::DoNotOptimize(error);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(length));
}
BENCHMARK(BM_ErrorOnInterval)->Arg(60)->Arg(600)->Arg(86400);

void BM_OptimizeFrame(benchmark::State& state) {
    const auto devices = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 scenario_rng(3);
    const DeviceLibrary library = random_library(scenario_rng, devices, 5);
    const StateChangeMatrix truth = random_states(scenario_rng, 60, devices, 2 * devices);
    PowerSeries target = reconstruct_power(truth, {library, 60});

    PsoConfig cfg;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        std::mt19937_64 rng(++seed);
        FrameResult result = optimize_frame(target, library, cfg, rng);
        benchmark::DoNotOptimize(result.best_error);
    }
}
BENCHMARK(BM_OptimizeFrame)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
