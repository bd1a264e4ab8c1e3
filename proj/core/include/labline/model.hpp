// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "labline/dataset.hpp"

namespace labline::model {

// Design-level sums for a centered dose vector shared by all labs:
// S_xxL = sum_j x_j^2 per lab, S_xxT = m * S_xxL over all labs.
struct Design {
    std::vector<double> x;
    std::size_t m = 0;
    std::size_t n = 0;
    double S_xxL = 0.0;
    double S_xxT = 0.0;
};

// Throws DegenerateDesignError when S_xxL is zero (single dose level).
Design design_stats(std::vector<double> x, std::size_t lab_count);
Design design_stats(const Dataset& data);

// Pooled line over all labs: a0 is the grand mean of the responses (the dose
// vector is centered), b0 = S_xyT / S_xxT.
struct OverallFit {
    double a0_hat = 0.0;
    double b0_hat = 0.0;
    double S_xyT = 0.0;
};

OverallFit fit_overall(const Dataset& data, const Design& design);

// Per-lab deviations from the pooled line: alpha[i] = mean(Y_i) - a0,
// beta[i] = S_xyL(i)/S_xxL - b0. Both sum to zero across labs. Lab i's own
// line is (a0 + alpha[i], b0 + beta[i]); fitted and residual matrices come
// from that line.
struct LabEffects {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> S_xyL;
    Matrix fitted;
    Matrix residuals;
};

LabEffects lab_effects(const Dataset& data, const Design& design, const OverallFit& overall);

}  // namespace labline::model
