// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labline/dataset.hpp"
#include "labline/model.hpp"

namespace labline::anova {

// Exact decomposition S_T = S_E + S_L + S_R with the between-laboratory part
// split as S_L = S_A (intercepts) + S_B (slopes), plus degrees of freedom.
struct SumsOfSquares {
    double S_T = 0.0;
    double S_E = 0.0;
    double S_L = 0.0;
    double S_R = 0.0;
    double S_A = 0.0;
    double S_B = 0.0;

    int phi_T = 0;  // mn - 1
    int phi_E = 0;  // mn - 2m
    int phi_L = 0;  // 2(m - 1)
    int phi_R = 1;
    int phi_A = 0;  // m - 1
    int phi_B = 0;  // m - 1
};

SumsOfSquares sums_of_squares(const Dataset& data, const model::Design& design,
                              const model::OverallFit& overall, const model::LabEffects& effects);

enum class Factor { Intercept, Slope, BetweenLab, Regression, Residual, Total };

std::string_view factor_label(Factor f);

struct AnovaRow {
    Factor factor;
    double sum_sq = 0.0;
    int dof = 0;
    std::optional<double> mean_sq;  // absent for the total row
};

struct FTestRecord {
    std::string name;  // "regression", "intercepts", "slopes"
    double f0 = 0.0;
    int df1 = 0;
    int df2 = 0;
    double p_value = 1.0;
    bool significant = false;
    bool defined = true;  // false when the denominator mean square is zero
    std::string note;     // reason when undefined
};

struct AnovaResult {
    std::vector<AnovaRow> rows;
    std::vector<FTestRecord> tests;
    std::optional<double> alpha;  // set when tests are attached
};

// Rows {L, R, E, T}; no tests attached.
AnovaResult basic_table(const SumsOfSquares& ss);

// Rows {A, B, R, E, T} with the three F tests attached. Degenerate statistics
// (zero denominator mean square) are reported as undefined rather than NaN.
AnovaResult detailed_table(const SumsOfSquares& ss, double alpha);

// The three tests in order: regression (V_R/V_B on (1, m-1)), intercept
// homogeneity (V_A/V_E on (m-1, mn-2m)), slope homogeneity (V_B/V_E, same df).
// Throws UndefinedTestError when a denominator mean square is zero.
std::array<FTestRecord, 3> run_f_tests(const SumsOfSquares& ss, double alpha);

// A variance component estimate; negative method-of-moments values are kept
// in `raw` and zero-truncated in `value`.
struct VarianceComponent {
    double raw = 0.0;
    double value = 0.0;
    bool truncated = false;
};

struct VarianceComponents {
    double sigma2_r = 0.0;          // repeatability, = V_E
    VarianceComponent sigma2_A;     // (V_A - V_E) / n
    VarianceComponent sigma2_B;     // (V_B - V_E) / S_xxL
    VarianceComponent sigma2_L;     // (2/n)(V_L - V_E), design-averaged
    double sigma2_R_repro = 0.0;    // reproducibility, sigma2_L.value + sigma2_r
};

VarianceComponents variance_components(const SumsOfSquares& ss, const model::Design& design);

struct ProfilePoint {
    double x = 0.0;
    double tau2 = 0.0;
};

// Dose-specific between-laboratory variance tau2(x) = sigma2_A + x^2 sigma2_B
// (zero-truncated components), at the distinct design doses plus any query
// points, ascending and de-duplicated.
struct PrecisionProfile {
    std::vector<ProfilePoint> points;
};

PrecisionProfile precision_profile(const VarianceComponents& vc, const model::Design& design,
                                   std::span<const double> query_x = {});

// Replication-weighted mean of tau2 over the full design vector; equals the
// design-averaged sigma2_L whenever no component was truncated.
double design_averaged_tau2(const VarianceComponents& vc, const model::Design& design);

}  // namespace labline::anova
