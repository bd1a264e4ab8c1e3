// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "labline/anova.hpp"
#include "labline/ingest.hpp"
#include "labline/model.hpp"

namespace labline::report {

// A report file could not be read back (missing fields, wrong schema, ...).
class ReportFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Everything one analysis run produces. The text rendering derives every
// number from these fields with format_sig, and the JSON rendering carries
// them at full precision, so text output is reproducible from the JSON alone.
struct Report {
    int schema = 1;
    std::string source;
    ingest::TransformSpec transforms;
    double alpha = 0.05;

    std::vector<std::string> labs;
    std::vector<double> x;  // full design vector (n values)
    double S_xxL = 0.0;
    double S_xxT = 0.0;

    double a0_hat = 0.0;
    double b0_hat = 0.0;
    std::vector<double> alpha_dev;  // per-lab intercept deviations
    std::vector<double> beta_dev;   // per-lab slope deviations

    anova::SumsOfSquares ss;
    std::vector<anova::FTestRecord> tests;
    anova::VarianceComponents components;
    std::vector<anova::ProfilePoint> profile;  // at the distinct design doses
    double design_averaged_tau2 = 0.0;

    std::vector<std::string> warnings;

    std::size_t lab_count() const noexcept { return labs.size(); }
    std::size_t obs_per_lab() const noexcept { return x.size(); }
};

// Full pipeline: transforms + balance validation, overall and per-lab fits,
// ANOVA tables, F tests, variance components, precision profile.
Report analyze(const ingest::RawTable& raw, const ingest::TransformSpec& spec, double alpha);

// Text rounding rule: every real number is printed with 4 significant digits
// (printf %.4g); integers (counts, degrees of freedom) print exactly.
std::string format_sig(double value, int significant_digits = 4);

std::string render_text(const Report& report);

// Versioned JSON ("schema": 1) with full-precision numbers.
std::string to_json_string(const Report& report);
Report from_json_string(const std::string& text);   // throws ReportFormatError
Report from_json_file(const std::filesystem::path& path);

}  // namespace labline::report
