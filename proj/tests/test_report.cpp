// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "labline/report.hpp"
#include "support/datagen.hpp"

using namespace labline;
using report::Report;

namespace {

ingest::TransformSpec study_spec() {
    ingest::TransformSpec spec;
    spec.dose_transform = ingest::DoseTransform::Log10;
    spec.center_doses = true;
    spec.response_transform = ingest::ResponseTransform::NaturalLog;
    return spec;
}

Report study_report() {
    const auto raw = ingest::parse_csv(std::string(LABLINE_DATA_DIR) + "/ldh.csv");
    return report::analyze(raw, study_spec(), 0.05);
}

// RawTable view of an in-memory dataset (identity transforms, pre-centered x).
ingest::RawTable to_raw(const Dataset& data) {
    ingest::RawTable raw;
    raw.source = "memory";
    for (std::size_t i = 0; i < data.lab_count(); ++i) {
        for (std::size_t j = 0; j < data.obs_per_lab(); ++j) {
            raw.rows.push_back({data.labs[i], data.x[j], data.y(i, j), i * 100 + j});
        }
    }
    return raw;
}

}  // namespace

TEST_CASE("format_sig: 4 significant digits, printf %.4g") {
    CHECK(report::format_sig(161.183) == "161.2");
    CHECK(report::format_sig(0.118773) == "0.1188");
    CHECK(report::format_sig(26.9112) == "26.91");
    CHECK(report::format_sig(0.0) == "0");
    CHECK(report::format_sig(-0.0) == "0");
    CHECK(report::format_sig(2.66e-54) == "2.66e-54");
    CHECK(report::format_sig(1234567.0) == "1.235e+06");
}

TEST_CASE("text rendering is reproducible from the JSON rendering alone") {
    const auto rep = study_report();
    const std::string text = report::render_text(rep);
    const std::string json = report::to_json_string(rep);
    const auto round_tripped = report::from_json_string(json);
    CHECK(report::render_text(round_tripped) == text);
    // and the JSON itself round-trips byte for byte
    CHECK(report::to_json_string(round_tripped) == json);
}

TEST_CASE("JSON carries schema 1 and full-precision values") {
    const auto rep = study_report();
    const std::string json = report::to_json_string(rep);
    CHECK(json.find("\"schema\": 1") != std::string::npos);

    const auto back = report::from_json_string(json);
    CHECK(back.schema == 1);
    CHECK(back.a0_hat == rep.a0_hat);  // bitwise: shortest-round-trip numbers
    CHECK(back.ss.S_T == rep.ss.S_T);
    CHECK(back.components.sigma2_L.raw == rep.components.sigma2_L.raw);
    CHECK(back.labs == rep.labs);
    CHECK(back.x == rep.x);
    REQUIRE(back.tests.size() == 3);
    CHECK(back.tests[0].name == "regression");
    CHECK(back.tests[0].p_value == rep.tests[0].p_value);
}

TEST_CASE("analyze is deterministic") {
    const auto a = study_report();
    const auto b = study_report();
    CHECK(report::to_json_string(a) == report::to_json_string(b));
    CHECK(report::render_text(a) == report::render_text(b));
}

TEST_CASE("report carries the fitted lines and the design sums") {
    const auto rep = study_report();
    CHECK(rep.lab_count() == 5);
    CHECK(rep.obs_per_lab() == 20);
    CHECK(rep.S_xxL == 6.25);
    CHECK(rep.S_xxT == 31.25);
    CHECK(rep.alpha_dev.size() == 5);
    CHECK(rep.beta_dev.size() == 5);
    CHECK(rep.profile.size() == 4);  // distinct design doses
    const std::string text = report::render_text(rep);
    CHECK(text.find("basic ANOVA table") != std::string::npos);
    CHECK(text.find("detailed ANOVA table") != std::string::npos);
    CHECK(text.find("variance components") != std::string::npos);
    CHECK(text.find("precision profile") != std::string::npos);
}

TEST_CASE("from_json rejects wrong schema and malformed input") {
    CHECK_THROWS_AS(report::from_json_string("{\"schema\": 2}"), report::ReportFormatError);
    CHECK_THROWS_AS(report::from_json_string("{not json"), report::ReportFormatError);
    CHECK_THROWS_AS(report::from_json_string("{\"schema\": 1}"), report::ReportFormatError);
    CHECK_THROWS_AS(report::from_json_file("/nonexistent/report.json"),
                    report::ReportFormatError);
}

TEST_CASE("negative variance estimates surface as warnings") {
    std::mt19937_64 rng(61);
    bool found = false;
    for (int attempt = 0; attempt < 200 && !found; ++attempt) {
        const auto data = testsupport::random_dataset(rng);
        ingest::TransformSpec spec;  // identity; x already centered
        spec.center_doses = false;
        const auto rep = report::analyze(to_raw(data), spec, 0.05);
        const bool truncated = rep.components.sigma2_A.truncated ||
                               rep.components.sigma2_B.truncated ||
                               rep.components.sigma2_L.truncated;
        if (!truncated) continue;
        found = true;
        CHECK(!rep.warnings.empty());
        const std::string text = report::render_text(rep);
        CHECK(text.find("truncated to 0") != std::string::npos);
    }
    CHECK(found);
}

TEST_CASE("alpha outside (0,1) is rejected") {
    const auto raw = ingest::parse_csv(std::string(LABLINE_DATA_DIR) + "/ldh.csv");
    CHECK_THROWS_AS(report::analyze(raw, study_spec(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(report::analyze(raw, study_spec(), 1.0), std::invalid_argument);
}
