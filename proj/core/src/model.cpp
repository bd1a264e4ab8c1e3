// SPDX-License-Identifier: Apache-2.0
#include "labline/model.hpp"

#include <utility>

#include "compensated.hpp"
#include "labline/errors.hpp"

namespace labline::model {

Design design_stats(std::vector<double> x, std::size_t lab_count) {
    detail::CompensatedSum sxx;
    for (double v : x) sxx.add(v * v);

    const double S_xxL = sxx.value();
    if (!(S_xxL > 0.0)) {
        throw DegenerateDesignError("degenerate design: S_xxL = sum of squared doses is zero");
    }

    Design design;
    design.n = x.size();
    design.x = std::move(x);
    design.m = lab_count;
    design.S_xxL = S_xxL;
    design.S_xxT = static_cast<double>(lab_count) * S_xxL;
    return design;
}

Design design_stats(const Dataset& data) {
    return design_stats(data.x, data.lab_count());
}

OverallFit fit_overall(const Dataset& data, const Design& design) {
    const std::size_t m = data.lab_count();
    const std::size_t n = data.obs_per_lab();

    // Lab-major, design-order accumulation keeps results bit-reproducible.
    detail::CompensatedSum total;
    detail::CompensatedSum cross;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            total.add(data.y(i, j));
            cross.add(data.x[j] * data.y(i, j));
        }
    }

    OverallFit fit;
    fit.a0_hat = total.value() / static_cast<double>(m * n);
    fit.S_xyT = cross.value();
    fit.b0_hat = fit.S_xyT / design.S_xxT;
    return fit;
}

LabEffects lab_effects(const Dataset& data, const Design& design, const OverallFit& overall) {
    const std::size_t m = data.lab_count();
    const std::size_t n = data.obs_per_lab();

    LabEffects effects;
    effects.alpha.resize(m);
    effects.beta.resize(m);
    effects.S_xyL.resize(m);
    effects.fitted = Matrix(m, n);
    effects.residuals = Matrix(m, n);

    for (std::size_t i = 0; i < m; ++i) {
        detail::CompensatedSum lab_sum;
        detail::CompensatedSum lab_cross;
        for (std::size_t j = 0; j < n; ++j) {
            lab_sum.add(data.y(i, j));
            lab_cross.add(data.x[j] * data.y(i, j));
        }
        effects.S_xyL[i] = lab_cross.value();
        effects.alpha[i] = lab_sum.value() / static_cast<double>(n) - overall.a0_hat;
        effects.beta[i] = effects.S_xyL[i] / design.S_xxL - overall.b0_hat;

        const double intercept_i = overall.a0_hat + effects.alpha[i];
        const double slope_i = overall.b0_hat + effects.beta[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double fitted = intercept_i + slope_i * data.x[j];
            effects.fitted(i, j) = fitted;
            effects.residuals(i, j) = data.y(i, j) - fitted;
        }
    }
    return effects;
}

}  // namespace labline::model
