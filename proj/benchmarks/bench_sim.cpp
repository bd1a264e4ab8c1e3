// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "labline/model.hpp"
#include "labline/sim.hpp"

namespace {

labline::sim::SimConfig paper_config() {
    std::vector<double> x;
    for (double v : {-0.75, -0.25, 0.25, 0.75}) {
        for (int r = 0; r < 5; ++r) x.push_back(v);
    }
    labline::sim::SimConfig cfg;
    cfg.design = labline::model::design_stats(std::move(x), 5);
    cfg.params = {0.0, 1.0, 0.5, 0.3, 0.2};
    cfg.seed = 7;
    return cfg;
}

void BM_SimulateDataset(benchmark::State& state) {
    const auto cfg = paper_config();
    std::uint64_t replicate = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(labline::sim::simulate_dataset(cfg, replicate++));
    }
}
BENCHMARK(BM_SimulateDataset);

// Replicate throughput of the Monte Carlo mean-square validation.
void BM_MonteCarloMeanSquares(benchmark::State& state) {
    auto cfg = paper_config();
    cfg.replications = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(labline::sim::monte_carlo_mean_squares(cfg));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_MonteCarloMeanSquares)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
