// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "labline/anova.hpp"
#include "labline/model.hpp"
#include "labline/sim.hpp"

namespace {

labline::sim::SimConfig config_for(std::size_t m, std::size_t dose_reps) {
    std::vector<double> x;
    for (double v : {-0.75, -0.25, 0.25, 0.75}) {
        for (std::size_t r = 0; r < dose_reps; ++r) x.push_back(v);
    }
    labline::sim::SimConfig cfg;
    cfg.design = labline::model::design_stats(std::move(x), m);
    cfg.params = {0.0, 1.0, 0.5, 0.3, 0.2};
    cfg.seed = 7;
    return cfg;
}

// Full estimation path on one dataset: overall fit, per-lab effects,
// decomposition, F tests, variance components, profile.
void BM_AnalyzePipeline(benchmark::State& state) {
    const auto cfg = config_for(static_cast<std::size_t>(state.range(0)),
                                static_cast<std::size_t>(state.range(1)));
    const auto data = labline::sim::simulate_dataset(cfg, 0);
    for (auto _ : state) {
        const auto design = labline::model::design_stats(data);
        const auto overall = labline::model::fit_overall(data, design);
        const auto effects = labline::model::lab_effects(data, design, overall);
        const auto ss = labline::anova::sums_of_squares(data, design, overall, effects);
        const auto tests = labline::anova::run_f_tests(ss, 0.05);
        const auto vc = labline::anova::variance_components(ss, design);
        const auto profile = labline::anova::precision_profile(vc, design);
        benchmark::DoNotOptimize(tests);
        benchmark::DoNotOptimize(profile);
    }
}
BENCHMARK(BM_AnalyzePipeline)->Args({5, 5})->Args({8, 6})->Args({20, 10});

}  // namespace
