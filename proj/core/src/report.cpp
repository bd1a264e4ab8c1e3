// SPDX-License-Identifier: Apache-2.0
#include "labline/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace labline::report {

namespace {

using nlohmann::json;

std::string lpad(std::string_view s, std::size_t width) {
    if (s.size() >= width) return std::string(s);
    return std::string(width - s.size(), ' ') + std::string(s);
}

std::string rpad(std::string_view s, std::size_t width) {
    if (s.size() >= width) return std::string(s);
    return std::string(s) + std::string(width - s.size(), ' ');
}

// Distinct design doses with replication counts, e.g. "-0.75 (x5), -0.25 (x5)".
std::string describe_design(const std::vector<double>& x) {
    std::string out;
    std::size_t j = 0;
    while (j < x.size()) {
        std::size_t k = j;
        while (k < x.size() && x[k] == x[j]) ++k;
        if (!out.empty()) out += ", ";
        out += format_sig(x[j]) + " (x" + std::to_string(k - j) + ")";
        j = k;
    }
    return out;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += items[i];
    }
    return out;
}

void render_anova_rows(std::ostringstream& out, const anova::AnovaResult& table,
                       const std::vector<anova::FTestRecord>* tests, double alpha) {
    constexpr std::size_t kFactor = 24, kNum = 11, kPhi = 7;
    out << "  " << rpad("factor", kFactor) << lpad("S", kNum) << lpad("phi", kPhi)
        << lpad("V", kNum);
    if (tests) out << lpad("F0", kNum) << lpad("p", kNum + 2);
    out << "\n";

    for (const auto& row : table.rows) {
        out << "  " << rpad(anova::factor_label(row.factor), kFactor)
            << lpad(format_sig(row.sum_sq), kNum) << lpad(std::to_string(row.dof), kPhi);
        if (row.mean_sq) {
            out << lpad(format_sig(*row.mean_sq), kNum);
        } else {
            out << lpad("", kNum);
        }
        if (tests) {
            const anova::FTestRecord* match = nullptr;
            for (const auto& t : *tests) {
                if ((row.factor == anova::Factor::Regression && t.name == "regression") ||
                    (row.factor == anova::Factor::Intercept && t.name == "intercepts") ||
                    (row.factor == anova::Factor::Slope && t.name == "slopes")) {
                    match = &t;
                }
            }
            if (match) {
                if (match->defined) {
                    out << lpad(format_sig(match->f0) + (match->significant ? "*" : ""), kNum)
                        << lpad(format_sig(match->p_value), kNum + 2);
                } else {
                    out << lpad("n/a", kNum) << lpad("n/a", kNum + 2);
                }
            }
        }
        out << "\n";
    }
    if (tests) {
        out << "  (*) significant at alpha = " << format_sig(alpha) << "\n";
    }
}

json component_to_json(const anova::VarianceComponent& c) {
    return json{{"raw", c.raw}, {"value", c.value}, {"truncated", c.truncated}};
}

anova::VarianceComponent component_from_json(const json& j) {
    anova::VarianceComponent c;
    c.raw = j.at("raw").get<double>();
    c.value = j.at("value").get<double>();
    c.truncated = j.at("truncated").get<bool>();
    return c;
}

}  // namespace

Report analyze(const ingest::RawTable& raw, const ingest::TransformSpec& spec, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("significance level alpha must lie in (0, 1)");
    }

    const Dataset data = ingest::apply_transforms(raw, spec);
    const auto design = model::design_stats(data);
    const auto overall = model::fit_overall(data, design);
    const auto effects = model::lab_effects(data, design, overall);
    const auto ss = anova::sums_of_squares(data, design, overall, effects);
    const auto detailed = anova::detailed_table(ss, alpha);
    const auto components = anova::variance_components(ss, design);
    const auto profile = anova::precision_profile(components, design);

    Report report;
    report.source = raw.source;
    report.transforms = spec;
    report.alpha = alpha;
    report.labs = data.labs;
    report.x = data.x;
    report.S_xxL = design.S_xxL;
    report.S_xxT = design.S_xxT;
    report.a0_hat = overall.a0_hat;
    report.b0_hat = overall.b0_hat;
    report.alpha_dev = effects.alpha;
    report.beta_dev = effects.beta;
    report.ss = ss;
    report.tests = detailed.tests;
    report.components = components;
    report.profile = profile.points;
    report.design_averaged_tau2 = anova::design_averaged_tau2(components, design);

    const auto warn_truncated = [&](const char* name, const anova::VarianceComponent& c) {
        if (c.truncated) {
            report.warnings.push_back(std::string(name) + " estimate is negative (raw " +
                                      format_sig(c.raw) + "); truncated to 0 for reporting");
        }
    };
    warn_truncated("sigma2_A", components.sigma2_A);
    warn_truncated("sigma2_B", components.sigma2_B);
    warn_truncated("sigma2_L", components.sigma2_L);
    for (const auto& t : report.tests) {
        if (!t.defined) {
            report.warnings.push_back(t.name + " test undefined: " + t.note);
        }
    }
    return report;
}

std::string format_sig(double value, int significant_digits) {
    if (value == 0.0) value = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
    return buf;
}

std::string render_text(const Report& report) {
    std::ostringstream out;
    const std::size_t m = report.lab_count();
    const std::size_t n = report.obs_per_lab();

    out << "interlaboratory precision report\n";
    out << "source:        " << report.source << "\n";
    out << "laboratories:  " << m << " (" << join(report.labs, ", ") << ")\n";
    out << "observations:  " << n << " per laboratory\n";
    out << "transforms:    dose=" << ingest::to_string(report.transforms.dose_transform)
        << (report.transforms.center_doses ? " (centered)" : "")
        << ", response=" << ingest::to_string(report.transforms.response_transform) << "\n";
    out << "alpha:         " << format_sig(report.alpha) << "\n";
    out << "design doses:  " << describe_design(report.x) << "\n";
    out << "S_xxL:         " << format_sig(report.S_xxL) << "\n";
    out << "S_xxT:         " << format_sig(report.S_xxT) << "\n";

    out << "\nper-laboratory lines (intercept = a0 + alpha_i, slope = b0 + beta_i)\n";
    out << "  " << rpad("lab", 14) << lpad("intercept", 12) << lpad("slope", 12) << "\n";
    for (std::size_t i = 0; i < m; ++i) {
        out << "  " << rpad(report.labs[i], 14)
            << lpad(format_sig(report.a0_hat + report.alpha_dev[i]), 12)
            << lpad(format_sig(report.b0_hat + report.beta_dev[i]), 12) << "\n";
    }
    out << "  " << rpad("overall", 14) << lpad(format_sig(report.a0_hat), 12)
        << lpad(format_sig(report.b0_hat), 12) << "\n";

    out << "\nbasic ANOVA table\n";
    render_anova_rows(out, anova::basic_table(report.ss), nullptr, report.alpha);

    out << "\ndetailed ANOVA table\n";
    anova::AnovaResult detailed;
    detailed.rows = {
        {anova::Factor::Intercept, report.ss.S_A, report.ss.phi_A, report.ss.S_A / report.ss.phi_A},
        {anova::Factor::Slope, report.ss.S_B, report.ss.phi_B, report.ss.S_B / report.ss.phi_B},
        {anova::Factor::Regression, report.ss.S_R, report.ss.phi_R, report.ss.S_R / report.ss.phi_R},
        {anova::Factor::Residual, report.ss.S_E, report.ss.phi_E, report.ss.S_E / report.ss.phi_E},
        {anova::Factor::Total, report.ss.S_T, report.ss.phi_T, std::nullopt},
    };
    render_anova_rows(out, detailed, &report.tests, report.alpha);

    out << "\nvariance components\n";
    const auto& vc = report.components;
    const auto component_line = [&](const char* label, const char* symbol,
                                    const anova::VarianceComponent& c) {
        out << "  " << rpad(label, 20) << symbol << " = " << format_sig(c.value);
        if (c.truncated) out << "  (raw " << format_sig(c.raw) << ", truncated to 0)";
        out << "\n";
    };
    out << "  " << rpad("repeatability", 20) << "sigma2_r = " << format_sig(vc.sigma2_r) << "\n";
    component_line("intercept", "sigma2_A", vc.sigma2_A);
    component_line("slope", "sigma2_B", vc.sigma2_B);
    component_line("between-laboratory", "sigma2_L", vc.sigma2_L);
    out << "  " << rpad("reproducibility", 20) << "sigma2_R = " << format_sig(vc.sigma2_R_repro)
        << "\n";

    out << "\nprecision profile  tau2(x) = sigma2_A + x^2 * sigma2_B\n";
    out << "  " << lpad("x", 10) << lpad("tau2", 12) << "\n";
    for (const auto& point : report.profile) {
        out << "  " << lpad(format_sig(point.x), 10) << lpad(format_sig(point.tau2), 12) << "\n";
    }
    out << "  design-averaged tau2 = " << format_sig(report.design_averaged_tau2) << "\n";

    out << "\nwarnings: ";
    if (report.warnings.empty()) {
        out << "none\n";
    } else {
        out << "\n";
        for (const auto& w : report.warnings) out << "  - " << w << "\n";
    }
    return out.str();
}

std::string to_json_string(const Report& report) {
    json j;
    j["schema"] = report.schema;
    j["source"] = report.source;
    j["alpha"] = report.alpha;
    j["transforms"] = {
        {"dose", std::string(ingest::to_string(report.transforms.dose_transform))},
        {"center", report.transforms.center_doses},
        {"response", std::string(ingest::to_string(report.transforms.response_transform))},
    };
    j["labs"] = report.labs;
    j["design"] = {
        {"x", report.x},
        {"m", report.lab_count()},
        {"n", report.obs_per_lab()},
        {"S_xxL", report.S_xxL},
        {"S_xxT", report.S_xxT},
    };
    j["fit"] = {
        {"a0", report.a0_hat},
        {"b0", report.b0_hat},
        {"alpha_dev", report.alpha_dev},
        {"beta_dev", report.beta_dev},
    };
    j["anova"] = {
        {"S",
         {{"T", report.ss.S_T},
          {"E", report.ss.S_E},
          {"L", report.ss.S_L},
          {"R", report.ss.S_R},
          {"A", report.ss.S_A},
          {"B", report.ss.S_B}}},
        {"phi",
         {{"T", report.ss.phi_T},
          {"E", report.ss.phi_E},
          {"L", report.ss.phi_L},
          {"R", report.ss.phi_R},
          {"A", report.ss.phi_A},
          {"B", report.ss.phi_B}}},
        {"V",
         {{"L", report.ss.S_L / report.ss.phi_L},
          {"R", report.ss.S_R / report.ss.phi_R},
          {"E", report.ss.S_E / report.ss.phi_E},
          {"A", report.ss.S_A / report.ss.phi_A},
          {"B", report.ss.S_B / report.ss.phi_B}}},
    };
    j["tests"] = json::array();
    for (const auto& t : report.tests) {
        j["tests"].push_back({{"name", t.name},
                              {"F0", t.f0},
                              {"df1", t.df1},
                              {"df2", t.df2},
                              {"p", t.p_value},
                              {"significant", t.significant},
                              {"defined", t.defined},
                              {"note", t.note}});
    }
    j["variance_components"] = {
        {"sigma2_r", report.components.sigma2_r},
        {"sigma2_A", component_to_json(report.components.sigma2_A)},
        {"sigma2_B", component_to_json(report.components.sigma2_B)},
        {"sigma2_L", component_to_json(report.components.sigma2_L)},
        {"sigma2_R", report.components.sigma2_R_repro},
    };
    j["profile"] = json::array();
    for (const auto& point : report.profile) {
        j["profile"].push_back({{"x", point.x}, {"tau2", point.tau2}});
    }
    j["design_averaged_tau2"] = report.design_averaged_tau2;
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

Report from_json_string(const std::string& text) {
    try {
        const json j = json::parse(text);

        if (!j.contains("schema") || !j.at("schema").is_number_integer() ||
            j.at("schema").get<int>() != 1) {
            throw ReportFormatError("unsupported report schema (expected \"schema\": 1)");
        }

        Report report;
        report.schema = 1;
        report.source = j.at("source").get<std::string>();
        report.alpha = j.at("alpha").get<double>();

        const auto& transforms = j.at("transforms");
        const auto dose = ingest::parse_dose_transform(transforms.at("dose").get<std::string>());
        const auto response =
            ingest::parse_response_transform(transforms.at("response").get<std::string>());
        if (!dose || !response) {
            throw ReportFormatError("unknown transform name in report");
        }
        report.transforms.dose_transform = *dose;
        report.transforms.response_transform = *response;
        report.transforms.center_doses = transforms.at("center").get<bool>();

        report.labs = j.at("labs").get<std::vector<std::string>>();
        const auto& design = j.at("design");
        report.x = design.at("x").get<std::vector<double>>();
        report.S_xxL = design.at("S_xxL").get<double>();
        report.S_xxT = design.at("S_xxT").get<double>();

        const auto& fit = j.at("fit");
        report.a0_hat = fit.at("a0").get<double>();
        report.b0_hat = fit.at("b0").get<double>();
        report.alpha_dev = fit.at("alpha_dev").get<std::vector<double>>();
        report.beta_dev = fit.at("beta_dev").get<std::vector<double>>();

        const auto& ss = j.at("anova");
        report.ss.S_T = ss.at("S").at("T").get<double>();
        report.ss.S_E = ss.at("S").at("E").get<double>();
        report.ss.S_L = ss.at("S").at("L").get<double>();
        report.ss.S_R = ss.at("S").at("R").get<double>();
        report.ss.S_A = ss.at("S").at("A").get<double>();
        report.ss.S_B = ss.at("S").at("B").get<double>();
        report.ss.phi_T = ss.at("phi").at("T").get<int>();
        report.ss.phi_E = ss.at("phi").at("E").get<int>();
        report.ss.phi_L = ss.at("phi").at("L").get<int>();
        report.ss.phi_R = ss.at("phi").at("R").get<int>();
        report.ss.phi_A = ss.at("phi").at("A").get<int>();
        report.ss.phi_B = ss.at("phi").at("B").get<int>();

        for (const auto& t : j.at("tests")) {
            anova::FTestRecord record;
            record.name = t.at("name").get<std::string>();
            record.f0 = t.at("F0").get<double>();
            record.df1 = t.at("df1").get<int>();
            record.df2 = t.at("df2").get<int>();
            record.p_value = t.at("p").get<double>();
            record.significant = t.at("significant").get<bool>();
            record.defined = t.at("defined").get<bool>();
            record.note = t.at("note").get<std::string>();
            report.tests.push_back(std::move(record));
        }

        const auto& vc = j.at("variance_components");
        report.components.sigma2_r = vc.at("sigma2_r").get<double>();
        report.components.sigma2_A = component_from_json(vc.at("sigma2_A"));
        report.components.sigma2_B = component_from_json(vc.at("sigma2_B"));
        report.components.sigma2_L = component_from_json(vc.at("sigma2_L"));
        report.components.sigma2_R_repro = vc.at("sigma2_R").get<double>();

        for (const auto& point : j.at("profile")) {
            report.profile.push_back(
                {point.at("x").get<double>(), point.at("tau2").get<double>()});
        }
        report.design_averaged_tau2 = j.at("design_averaged_tau2").get<double>();
        report.warnings = j.at("warnings").get<std::vector<std::string>>();
        return report;
    } catch (const json::exception& e) {
        throw ReportFormatError(std::string("malformed report: ") + e.what());
    }
}

Report from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ReportFormatError("cannot open report file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_string(buffer.str());
}

}  // namespace labline::report
