// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "labline/fdist.hpp"

namespace {

void BM_FCdf(benchmark::State& state) {
    const labline::fdist::FParams p(static_cast<double>(state.range(0)),
                                    static_cast<double>(state.range(1)));
    double x = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(labline::fdist::f_cdf(x, p));
        x += 0.37;
        if (x > 10.0) x = 0.01;
    }
}
BENCHMARK(BM_FCdf)->Args({1, 1})->Args({4, 90})->Args({90, 90});

void BM_FSf(benchmark::State& state) {
    const labline::fdist::FParams p(4, 90);
    double x = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(labline::fdist::f_sf(x, p));
        x += 0.37;
        if (x > 10.0) x = 0.01;
    }
}
BENCHMARK(BM_FSf);

void BM_FQuantile(benchmark::State& state) {
    const labline::fdist::FParams p(4, 90);
    double q = 0.013;
    for (auto _ : state) {
        benchmark::DoNotOptimize(labline::fdist::f_quantile(q, p));
        q += 0.037;
        if (q >= 0.99) q = 0.013;
    }
}
BENCHMARK(BM_FQuantile);

}  // namespace
