// SPDX-License-Identifier: Apache-2.0
#include "labline/anova.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "compensated.hpp"
#include "labline/errors.hpp"
#include "labline/fdist.hpp"

namespace labline::anova {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("significance level alpha must lie in (0, 1)");
    }
}

std::optional<FTestRecord> try_f_test(std::string name, double numerator, double denominator,
                                      int df1, int df2, double alpha) {
    if (!(denominator > 0.0)) return std::nullopt;
    FTestRecord record;
    record.name = std::move(name);
    record.f0 = numerator / denominator;
    record.df1 = df1;
    record.df2 = df2;
    record.p_value = fdist::f_sf(record.f0, fdist::FParams(df1, df2));
    record.significant = record.p_value < alpha;
    return record;
}

VarianceComponent make_component(double raw) {
    VarianceComponent c;
    c.raw = raw;
    c.truncated = raw < 0.0;
    c.value = c.truncated ? 0.0 : raw;
    return c;
}

}  // namespace

SumsOfSquares sums_of_squares(const Dataset& data, const model::Design& design,
                              const model::OverallFit& overall, const model::LabEffects& effects) {
    const std::size_t m = data.lab_count();
    const std::size_t n = data.obs_per_lab();

    detail::CompensatedSum total_sq;
    detail::CompensatedSum resid_sq;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dev = data.y(i, j) - overall.a0_hat;
            total_sq.add(dev * dev);
            const double r = effects.residuals(i, j);
            resid_sq.add(r * r);
        }
    }

    detail::CompensatedSum alpha_sq;
    detail::CompensatedSum beta_sq;
    for (std::size_t i = 0; i < m; ++i) {
        alpha_sq.add(effects.alpha[i] * effects.alpha[i]);
        beta_sq.add(effects.beta[i] * effects.beta[i]);
    }

    SumsOfSquares ss;
    ss.S_T = total_sq.value();
    ss.S_E = resid_sq.value();
    ss.S_R = overall.S_xyT * overall.S_xyT / design.S_xxT;
    ss.S_A = static_cast<double>(n) * alpha_sq.value();
    ss.S_B = design.S_xxL * beta_sq.value();
    ss.S_L = ss.S_A + ss.S_B;

    const int mi = static_cast<int>(m);
    const int ni = static_cast<int>(n);
    ss.phi_T = mi * ni - 1;
    ss.phi_E = mi * ni - 2 * mi;
    ss.phi_L = 2 * (mi - 1);
    ss.phi_R = 1;
    ss.phi_A = mi - 1;
    ss.phi_B = mi - 1;
    return ss;
}

std::string_view factor_label(Factor f) {
    switch (f) {
        case Factor::Intercept: return "intercepts (A)";
        case Factor::Slope: return "slopes (B)";
        case Factor::BetweenLab: return "between-laboratory (L)";
        case Factor::Regression: return "regression (R)";
        case Factor::Residual: return "residual (E)";
        case Factor::Total: return "total (T)";
    }
    return "";
}

AnovaResult basic_table(const SumsOfSquares& ss) {
    AnovaResult result;
    result.rows = {
        {Factor::BetweenLab, ss.S_L, ss.phi_L, ss.S_L / ss.phi_L},
        {Factor::Regression, ss.S_R, ss.phi_R, ss.S_R / ss.phi_R},
        {Factor::Residual, ss.S_E, ss.phi_E, ss.S_E / ss.phi_E},
        {Factor::Total, ss.S_T, ss.phi_T, std::nullopt},
    };
    return result;
}

AnovaResult detailed_table(const SumsOfSquares& ss, double alpha) {
    require_alpha(alpha);

    AnovaResult result;
    result.alpha = alpha;
    result.rows = {
        {Factor::Intercept, ss.S_A, ss.phi_A, ss.S_A / ss.phi_A},
        {Factor::Slope, ss.S_B, ss.phi_B, ss.S_B / ss.phi_B},
        {Factor::Regression, ss.S_R, ss.phi_R, ss.S_R / ss.phi_R},
        {Factor::Residual, ss.S_E, ss.phi_E, ss.S_E / ss.phi_E},
        {Factor::Total, ss.S_T, ss.phi_T, std::nullopt},
    };

    const double V_A = ss.S_A / ss.phi_A;
    const double V_B = ss.S_B / ss.phi_B;
    const double V_R = ss.S_R / ss.phi_R;
    const double V_E = ss.S_E / ss.phi_E;

    const auto attach = [&](std::string name, double num, double den, int df1, int df2,
                            const char* den_name) {
        if (auto record = try_f_test(name, num, den, df1, df2, alpha)) {
            result.tests.push_back(std::move(*record));
        } else {
            FTestRecord undefined;
            undefined.name = std::move(name);
            undefined.df1 = df1;
            undefined.df2 = df2;
            undefined.defined = false;
            undefined.note = std::string("denominator mean square ") + den_name + " is zero";
            result.tests.push_back(std::move(undefined));
        }
    };

    attach("regression", V_R, V_B, 1, ss.phi_B, "V_B");
    attach("intercepts", V_A, V_E, ss.phi_A, ss.phi_E, "V_E");
    attach("slopes", V_B, V_E, ss.phi_B, ss.phi_E, "V_E");
    return result;
}

std::array<FTestRecord, 3> run_f_tests(const SumsOfSquares& ss, double alpha) {
    require_alpha(alpha);

    const double V_A = ss.S_A / ss.phi_A;
    const double V_B = ss.S_B / ss.phi_B;
    const double V_R = ss.S_R / ss.phi_R;
    const double V_E = ss.S_E / ss.phi_E;

    auto regression = try_f_test("regression", V_R, V_B, 1, ss.phi_B, alpha);
    if (!regression) {
        throw UndefinedTestError("regression test undefined: denominator mean square V_B is zero");
    }
    auto intercepts = try_f_test("intercepts", V_A, V_E, ss.phi_A, ss.phi_E, alpha);
    if (!intercepts) {
        throw UndefinedTestError("intercepts test undefined: denominator mean square V_E is zero");
    }
    auto slopes = try_f_test("slopes", V_B, V_E, ss.phi_B, ss.phi_E, alpha);
    if (!slopes) {
        throw UndefinedTestError("slopes test undefined: denominator mean square V_E is zero");
    }
    return {std::move(*regression), std::move(*intercepts), std::move(*slopes)};
}

VarianceComponents variance_components(const SumsOfSquares& ss, const model::Design& design) {
    const double V_A = ss.S_A / ss.phi_A;
    const double V_B = ss.S_B / ss.phi_B;
    const double V_L = ss.S_L / ss.phi_L;
    const double V_E = ss.S_E / ss.phi_E;
    const double n = static_cast<double>(design.n);

    VarianceComponents vc;
    vc.sigma2_r = V_E;
    vc.sigma2_L = make_component((2.0 / n) * (V_L - V_E));
    vc.sigma2_A = make_component((V_A - V_E) / n);
    vc.sigma2_B = make_component((V_B - V_E) / design.S_xxL);
    vc.sigma2_R_repro = vc.sigma2_L.value + vc.sigma2_r;
    return vc;
}

PrecisionProfile precision_profile(const VarianceComponents& vc, const model::Design& design,
                                   std::span<const double> query_x) {
    std::vector<double> xs(design.x.begin(), design.x.end());
    xs.insert(xs.end(), query_x.begin(), query_x.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    PrecisionProfile profile;
    profile.points.reserve(xs.size());
    for (double x : xs) {
        profile.points.push_back({x, vc.sigma2_A.value + x * x * vc.sigma2_B.value});
    }
    return profile;
}

double design_averaged_tau2(const VarianceComponents& vc, const model::Design& design) {
    detail::CompensatedSum sum;
    for (double x : design.x) {
        sum.add(vc.sigma2_A.value + x * x * vc.sigma2_B.value);
    }
    return sum.value() / static_cast<double>(design.n);
}

}  // namespace labline::anova
