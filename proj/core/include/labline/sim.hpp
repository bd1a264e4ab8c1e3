// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "labline/dataset.hpp"
#include "labline/model.hpp"

namespace labline::sim {

// True parameters of the generating model
//   Y_ij = (a0 + A_i) + (b0 + B_i) x_j + E_ij
// with A_i ~ N(0, sigma_A^2), B_i ~ N(0, sigma_B^2), E_ij ~ N(0, sigma_E^2),
// all independent.
struct ModelParams {
    double a0 = 0.0;
    double b0 = 0.0;
    double sigma_A = 0.0;
    double sigma_B = 0.0;
    double sigma_E = 0.0;
};

struct SimConfig {
    model::Design design;  // centered common dose vector, m labs
    ModelParams params;
    std::uint64_t replications = 1;
    std::uint64_t seed = 0;
};

// Draws one balanced dataset. Every normal variate comes from a counter-based
// substream keyed by (seed, replicate, role, index), so the same
// (seed, replicate_index) is bit-identical regardless of evaluation order.
Dataset simulate_dataset(const SimConfig& cfg, std::uint64_t replicate_index);

struct MonteCarloStat {
    double empirical_mean = 0.0;
    double std_error = 0.0;
    double expected = 0.0;  // closed-form expectation of the mean square
};

struct MeanSquareSummary {
    MonteCarloStat V_A;
    MonteCarloStat V_B;
    MonteCarloStat V_L;
    MonteCarloStat V_R;
    MonteCarloStat V_E;
    std::uint64_t replications = 0;
};

// Empirical means of the five mean squares against their expectations:
//   E[V_A] = n sigma_A^2 + sigma_E^2
//   E[V_B] = S_xxL sigma_B^2 + sigma_E^2
//   E[V_L] = (n/2) sigma_L^2 + sigma_E^2,  sigma_L^2 = sigma_A^2 + (S_xxL/n) sigma_B^2
//   E[V_R] = b0^2 S_xxT + S_xxL sigma_B^2 + sigma_E^2
//   E[V_E] = sigma_E^2
// Requires replications >= 100. Replicates may be evaluated in parallel; the
// reduction runs in fixed replicate order, so results do not depend on the
// thread count.
MeanSquareSummary monte_carlo_mean_squares(const SimConfig& cfg, unsigned threads = 0);

enum class FTestKind { Regression, Intercepts, Slopes };

struct RejectionRate {
    double rate = 0.0;
    double std_error = 0.0;  // sqrt(alpha (1 - alpha) / replications)
    std::uint64_t replications = 0;
};

// Fraction of replicates whose test rejects at alpha, under arbitrary params
// (power studies).
RejectionRate rejection_rate(const SimConfig& cfg, FTestKind test, double alpha,
                             unsigned threads = 0);

// Same, but validates that the params satisfy the requested null hypothesis
// (regression: b0 = 0; intercepts: sigma_A = 0; slopes: sigma_B = 0) and
// throws std::invalid_argument otherwise.
RejectionRate null_rejection_rate(const SimConfig& cfg, FTestKind test, double alpha,
                                  unsigned threads = 0);

}  // namespace labline::sim
