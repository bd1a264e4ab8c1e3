// SPDX-License-Identifier: Apache-2.0
#include "labline/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "compensated.hpp"
#include "labline/anova.hpp"
#include "labline/errors.hpp"
#include "labline/fdist.hpp"

namespace labline::sim {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// One 64-bit word per (seed, replicate, role, index); no sequential state.
std::uint64_t substream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t role,
                        std::uint64_t index) {
    std::uint64_t h = splitmix(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix(h ^ replicate);
    h = splitmix(h ^ role);
    h = splitmix(h ^ index);
    return h;
}

// Map to the open interval (0, 1): 53 bits plus a half-ulp offset.
double to_unit(std::uint64_t u) {
    return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse standard normal CDF by safeguarded Newton on Phi(z) - p, with Phi
// evaluated through erfc. The tail start comes from the asymptotic
// Phi(z) ~ phi(z)/|z|, i.e. z^2 ~ u - ln(2 pi u) with u = -2 ln p.
double inverse_normal_cdf(double p) {
    double z;
    const double pt = std::min(p, 1.0 - p);
    if (pt < 0.08) {
        const double u = -2.0 * std::log(pt);
        z = -std::sqrt(std::max(u - std::log(2.0 * M_PI * u), 0.0));
        if (p > 0.5) z = -z;
    } else {
        z = 0.0;
    }

    for (int it = 0; it < 100; ++it) {
        const double cdf = 0.5 * std::erfc(-z * M_SQRT1_2);
        const double pdf = std::exp(-0.5 * z * z) * kInvSqrt2Pi;
        const double step = (cdf - p) / pdf;
        z -= step;
        if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

enum Role : std::uint64_t { kInterceptRole = 0, kSlopeRole = 1, kResidualRole = 2 };

double normal_draw(std::uint64_t seed, std::uint64_t replicate, std::uint64_t role,
                   std::uint64_t index, double sigma) {
    return sigma * inverse_normal_cdf(to_unit(substream(seed, replicate, role, index)));
}

void validate_params(const ModelParams& p) {
    if (!(p.sigma_A >= 0.0) || !(p.sigma_B >= 0.0) || !(p.sigma_E >= 0.0)) {
        throw std::invalid_argument("model standard deviations must be nonnegative");
    }
    if (!std::isfinite(p.a0) || !std::isfinite(p.b0)) {
        throw std::invalid_argument("model intercept and slope must be finite");
    }
}

void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("significance level alpha must lie in (0, 1)");
    }
}

// Evaluate fn(r) for r in [0, count), split across threads. Each index is
// computed exactly once and writes only its own slot, so the schedule cannot
// change any result.
template <typename Fn>
void for_each_replicate(std::uint64_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) {
        threads = std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
    }
    if (threads <= 1 || count < 1024) {
        for (std::uint64_t r = 0; r < count; ++r) fn(r);
        return;
    }

    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::uint64_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::uint64_t begin = t * chunk;
        const std::uint64_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] {
            for (std::uint64_t r = begin; r < end; ++r) fn(r);
        });
    }
    for (auto& th : pool) th.join();
}

struct MeanSquares {
    double V_A = 0.0;
    double V_B = 0.0;
    double V_L = 0.0;
    double V_R = 0.0;
    double V_E = 0.0;
};

MeanSquares replicate_mean_squares(const SimConfig& cfg, std::uint64_t replicate) {
    const Dataset data = simulate_dataset(cfg, replicate);
    const auto overall = model::fit_overall(data, cfg.design);
    const auto effects = model::lab_effects(data, cfg.design, overall);
    const auto ss = anova::sums_of_squares(data, cfg.design, overall, effects);
    return {ss.S_A / ss.phi_A, ss.S_B / ss.phi_B, ss.S_L / ss.phi_L, ss.S_R / ss.phi_R,
            ss.S_E / ss.phi_E};
}

MonteCarloStat reduce(const std::vector<double>& values, double expected) {
    const auto count = static_cast<double>(values.size());
    detail::CompensatedSum sum;
    for (double v : values) sum.add(v);
    const double mean = sum.value() / count;

    detail::CompensatedSum sq;
    for (double v : values) {
        const double d = v - mean;
        sq.add(d * d);
    }
    const double variance = sq.value() / (count - 1.0);

    MonteCarloStat stat;
    stat.empirical_mean = mean;
    stat.std_error = std::sqrt(variance / count);
    stat.expected = expected;
    return stat;
}

}  // namespace

Dataset simulate_dataset(const SimConfig& cfg, std::uint64_t replicate_index) {
    validate_params(cfg.params);
    const auto& design = cfg.design;
    const std::size_t m = design.m;
    const std::size_t n = design.n;
    const auto& p = cfg.params;

    Dataset data;
    data.labs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        data.labs.push_back("L" + std::to_string(i + 1));
    }
    data.x = design.x;
    data.y = Matrix(m, n);

    for (std::size_t i = 0; i < m; ++i) {
        const double A_i = normal_draw(cfg.seed, replicate_index, kInterceptRole, i, p.sigma_A);
        const double B_i = normal_draw(cfg.seed, replicate_index, kSlopeRole, i, p.sigma_B);
        for (std::size_t j = 0; j < n; ++j) {
            const double E_ij =
                normal_draw(cfg.seed, replicate_index, kResidualRole, i * n + j, p.sigma_E);
            data.y(i, j) = (p.a0 + A_i) + (p.b0 + B_i) * design.x[j] + E_ij;
        }
    }
    return data;
}

MeanSquareSummary monte_carlo_mean_squares(const SimConfig& cfg, unsigned threads) {
    validate_params(cfg.params);
    if (cfg.replications < 100) {
        throw std::invalid_argument("mean-square validation requires at least 100 replications");
    }

    const std::uint64_t reps = cfg.replications;
    std::vector<double> v_A(reps), v_B(reps), v_L(reps), v_R(reps), v_E(reps);
    for_each_replicate(reps, threads, [&](std::uint64_t r) {
        const MeanSquares ms = replicate_mean_squares(cfg, r);
        v_A[r] = ms.V_A;
        v_B[r] = ms.V_B;
        v_L[r] = ms.V_L;
        v_R[r] = ms.V_R;
        v_E[r] = ms.V_E;
    });

    const auto& p = cfg.params;
    const auto& d = cfg.design;
    const double n = static_cast<double>(d.n);
    const double var_A = p.sigma_A * p.sigma_A;
    const double var_B = p.sigma_B * p.sigma_B;
    const double var_E = p.sigma_E * p.sigma_E;
    const double sigma2_L = var_A + (d.S_xxL / n) * var_B;

    MeanSquareSummary summary;
    summary.replications = reps;
    summary.V_A = reduce(v_A, n * var_A + var_E);
    summary.V_B = reduce(v_B, d.S_xxL * var_B + var_E);
    summary.V_L = reduce(v_L, (n / 2.0) * sigma2_L + var_E);
    summary.V_R = reduce(v_R, p.b0 * p.b0 * d.S_xxT + d.S_xxL * var_B + var_E);
    summary.V_E = reduce(v_E, var_E);
    return summary;
}

RejectionRate rejection_rate(const SimConfig& cfg, FTestKind test, double alpha,
                             unsigned threads) {
    validate_params(cfg.params);
    require_alpha(alpha);
    if (cfg.replications < 1) {
        throw std::invalid_argument("rejection rate requires at least 1 replication");
    }
    // A noise-free model makes the denominator mean square identically zero.
    if (test == FTestKind::Regression) {
        if (cfg.params.sigma_B == 0.0 && cfg.params.sigma_E == 0.0) {
            throw UndefinedTestError("regression test undefined: V_B is identically zero");
        }
    } else if (cfg.params.sigma_E == 0.0) {
        throw UndefinedTestError("homogeneity tests undefined: V_E is identically zero");
    }

    const int m = static_cast<int>(cfg.design.m);
    const int n = static_cast<int>(cfg.design.n);
    int df1 = 0, df2 = 0;
    switch (test) {
        case FTestKind::Regression: df1 = 1; df2 = m - 1; break;
        case FTestKind::Intercepts:
        case FTestKind::Slopes: df1 = m - 1; df2 = m * n - 2 * m; break;
    }
    const fdist::FParams params(df1, df2);

    // Workers must not throw (exceptions would escape the thread); a
    // degenerate denominator is flagged and reported after the join.
    constexpr std::uint8_t kUndefined = 2;
    const std::uint64_t reps = cfg.replications;
    std::vector<std::uint8_t> rejected(reps, 0);
    for_each_replicate(reps, threads, [&](std::uint64_t r) {
        const MeanSquares ms = replicate_mean_squares(cfg, r);
        double numerator = 0.0, denominator = 0.0;
        switch (test) {
            case FTestKind::Regression: numerator = ms.V_R; denominator = ms.V_B; break;
            case FTestKind::Intercepts: numerator = ms.V_A; denominator = ms.V_E; break;
            case FTestKind::Slopes: numerator = ms.V_B; denominator = ms.V_E; break;
        }
        if (!(denominator > 0.0)) {
            rejected[r] = kUndefined;
            return;
        }
        const double p_value = fdist::f_sf(numerator / denominator, params);
        rejected[r] = p_value < alpha ? 1 : 0;
    });

    std::uint64_t count = 0;
    for (std::uint8_t flag : rejected) {
        if (flag == kUndefined) {
            throw UndefinedTestError("test undefined: zero denominator mean square in a replicate");
        }
        count += flag;
    }

    RejectionRate result;
    result.replications = reps;
    result.rate = static_cast<double>(count) / static_cast<double>(reps);
    result.std_error = std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(reps));
    return result;
}

RejectionRate null_rejection_rate(const SimConfig& cfg, FTestKind test, double alpha,
                                  unsigned threads) {
    switch (test) {
        case FTestKind::Regression:
            if (cfg.params.b0 != 0.0) {
                throw std::invalid_argument("regression size run requires b0 = 0");
            }
            break;
        case FTestKind::Intercepts:
            if (cfg.params.sigma_A != 0.0) {
                throw std::invalid_argument("intercepts size run requires sigma_A = 0");
            }
            break;
        case FTestKind::Slopes:
            if (cfg.params.sigma_B != 0.0) {
                throw std::invalid_argument("slopes size run requires sigma_B = 0");
            }
            break;
    }
    return rejection_rate(cfg, test, alpha, threads);
}

}  // namespace labline::sim
