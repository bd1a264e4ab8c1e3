// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "labline/anova.hpp"
#include "labline/errors.hpp"
#include "labline/model.hpp"
#include "labline/report.hpp"

namespace labline::cli {

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIoOrParse;
    } catch (const report::ReportFormatError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIoOrParse;
    } catch (const TransformError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DegenerateDesignError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const UndefinedTestError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIoOrParse;
    }
}

// Shortest decimal representation that round-trips to the same double.
std::string dtos(double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

std::vector<double> read_design_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "cannot open design file");
    }
    std::vector<double> values;
    double v = 0.0;
    while (in >> v) values.push_back(v);
    if (!in.eof()) {
        throw ParseError(path, 0, "malformed design file: expected whitespace-separated numbers");
    }
    return values;
}

model::Design build_design(const SimulateOptions& opts) {
    std::vector<double> x;
    if (!opts.design_file.empty()) {
        x = read_design_file(opts.design_file);
    } else {
        for (double dose : opts.doses) {
            for (std::size_t r = 0; r < opts.dose_replicates; ++r) x.push_back(dose);
        }
    }
    if (x.empty()) {
        throw std::invalid_argument("no design doses given (use --x or --design-file)");
    }
    if (opts.m < 2) {
        throw std::invalid_argument("at least 2 laboratories required (--m)");
    }
    if (x.size() < 3) {
        throw std::invalid_argument(
            "at least 3 observations per laboratory required (repeat --x or raise --dose-reps)");
    }
    std::sort(x.begin(), x.end());

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    if (opts.center) {
        for (double& v : x) v -= mean;
    } else if (std::abs(mean) > 1e-9) {
        throw std::invalid_argument("design vector is not centered (mean " + dtos(mean) +
                                    "); pass --center or center the values yourself");
    }
    return model::design_stats(std::move(x), opts.m);
}

sim::FTestKind parse_test_kind(const std::string& name) {
    if (name == "regression") return sim::FTestKind::Regression;
    if (name == "intercepts") return sim::FTestKind::Intercepts;
    if (name == "slopes") return sim::FTestKind::Slopes;
    throw std::invalid_argument("unknown test '" + name +
                                "' (expected regression, intercepts or slopes)");
}

std::uint64_t default_reps(const std::string& mode) {
    if (mode == "mean-squares") return 20000;
    if (mode == "size") return 10000;
    return 2000;  // power
}

int run_mean_squares(const SimulateOptions& opts, const sim::SimConfig& cfg, std::ostream& out,
                     std::ostream& err) {
    const auto summary = sim::monte_carlo_mean_squares(cfg);

    out << "mean-square validation: " << summary.replications << " replicates, seed "
        << opts.seed << "\n";
    out << "  statistic    empirical           se     expected          |z|\n";

    bool ok = true;
    const auto row = [&](const char* name, const sim::MonteCarloStat& s) {
        const double z = std::abs(s.empirical_mean - s.expected) / s.std_error;
        char line[160];
        std::snprintf(line, sizeof line, "  %-10s %12.6g %12.4g %12.6g %12.3g%s\n", name,
                      s.empirical_mean, s.std_error, s.expected, z, z > 3.0 ? "  (outside 3 se)" : "");
        out << line;
        if (z > 3.0) ok = false;
    };
    row("V_A", summary.V_A);
    row("V_B", summary.V_B);
    row("V_L", summary.V_L);
    row("V_R", summary.V_R);
    row("V_E", summary.V_E);

    if (opts.check && !ok) {
        err << "check FAILED: at least one empirical mean square lies outside its 3-se band\n";
        return kExitCheckFailed;
    }
    if (opts.check) {
        out << "check passed: all empirical mean squares within 3 se of their expectations\n";
    }
    return kExitOk;
}

int run_size(const SimulateOptions& opts, const sim::SimConfig& cfg, std::ostream& out,
             std::ostream& err) {
    const auto kind = parse_test_kind(opts.test);
    const auto rate = sim::null_rejection_rate(cfg, kind, opts.alpha);
    const double band = 3.0 * rate.std_error;

    out << "size calibration: test=" << opts.test << ", alpha=" << dtos(opts.alpha) << ", "
        << rate.replications << " replicates, seed " << opts.seed << "\n";
    out << "  rejection rate = " << dtos(rate.rate) << "  (band " << dtos(opts.alpha - band)
        << " .. " << dtos(opts.alpha + band) << ")\n";

    if (opts.check && std::abs(rate.rate - opts.alpha) > band) {
        err << "check FAILED: empirical size outside the 3-se band\n";
        return kExitCheckFailed;
    }
    if (opts.check) {
        out << "check passed: empirical size within the 3-se band\n";
    }
    return kExitOk;
}

int run_power(const SimulateOptions& opts, const sim::SimConfig& cfg, std::ostream& out,
              std::ostream& err) {
    const auto kind = parse_test_kind(opts.test);
    std::vector<double> grid = opts.grid;
    std::sort(grid.begin(), grid.end());

    out << "power: test=" << opts.test << ", alpha=" << dtos(opts.alpha) << ", "
        << cfg.replications << " replicates per point, seed " << opts.seed << "\n";
    out << "  parameter     rate\n";

    std::vector<double> rates;
    std::vector<double> ses;
    for (double g : grid) {
        sim::SimConfig point = cfg;
        switch (kind) {
            case sim::FTestKind::Slopes: point.params.sigma_B = g; break;
            case sim::FTestKind::Intercepts: point.params.sigma_A = g; break;
            case sim::FTestKind::Regression: point.params.b0 = g; break;
        }
        const auto r = sim::rejection_rate(point, kind, opts.alpha);
        rates.push_back(r.rate);
        ses.push_back(std::sqrt(r.rate * (1.0 - r.rate) / static_cast<double>(r.replications)));
        char line[96];
        std::snprintf(line, sizeof line, "  %9.4g %8.4f\n", g, r.rate);
        out << line;
    }

    if (opts.check) {
        for (std::size_t i = 1; i < rates.size(); ++i) {
            // 1-se slack on the difference of adjacent points
            const double slack = std::sqrt(ses[i - 1] * ses[i - 1] + ses[i] * ses[i]);
            if (rates[i] < rates[i - 1] - slack) {
                err << "check FAILED: rejection rate decreases from " << dtos(rates[i - 1])
                    << " to " << dtos(rates[i]) << " beyond 1-se slack\n";
                return kExitCheckFailed;
            }
        }
        out << "check passed: rejection rates non-decreasing\n";
    }
    return kExitOk;
}

}  // namespace

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto raw = ingest::parse_csv(opts.csv_path);
        const auto rep = report::analyze(raw, opts.spec, opts.alpha);

        if (!opts.json_path.empty()) {
            std::ofstream json_out(opts.json_path);
            if (!json_out) {
                err << "error: cannot write JSON report to '" << opts.json_path << "'\n";
                return kExitIoOrParse;
            }
            json_out << report::to_json_string(rep);
        }
        out << report::render_text(rep);
        return kExitOk;
    });
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        sim::SimConfig cfg;
        cfg.design = build_design(opts);
        cfg.params = opts.params;
        cfg.replications = opts.reps == 0 ? default_reps(opts.mode) : opts.reps;
        cfg.seed = opts.seed;

        if (opts.mode == "mean-squares") return run_mean_squares(opts, cfg, out, err);
        if (opts.mode == "size") return run_size(opts, cfg, out, err);
        if (opts.mode == "power") return run_power(opts, cfg, out, err);
        throw std::invalid_argument("unknown mode '" + opts.mode + "'");
    });
}

int cmd_profile(const ProfileOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto rep = report::from_json_file(opts.report_path);
        const auto design = model::design_stats(rep.x, rep.lab_count());
        const auto profile = anova::precision_profile(rep.components, design, opts.query_x);

        out << "x,tau2\n";
        for (const auto& point : profile.points) {
            out << dtos(point.x) << "," << dtos(point.tau2) << "\n";
        }
        out << "# design-averaged tau2 = " << dtos(anova::design_averaged_tau2(rep.components, design))
            << "; sigma2_L = " << dtos(rep.components.sigma2_L.value) << "\n";
        return kExitOk;
    });
}

int run_main(int argc, char** argv) {
    CLI::App app{"precision evaluation for linear dose-response measurement methods"};
    app.require_subcommand(1);

    AnalyzeOptions analyze_opts;
    std::string response_transform = "none";
    std::string dose_transform = "none";
    bool analyze_center = true;

    auto* analyze = app.add_subcommand("analyze", "estimate precision components from a study CSV");
    analyze->add_option("csv", analyze_opts.csv_path, "input CSV with header lab,dose,response")
        ->required();
    analyze->add_option("--response-transform", response_transform, "ln, log10 or none")
        ->check(CLI::IsMember({"ln", "log10", "none"}));
    analyze->add_option("--dose-transform", dose_transform, "log10 or none")
        ->check(CLI::IsMember({"log10", "none"}));
    analyze->add_flag("--center,!--no-center", analyze_center,
                      "center the dose design vector (default: on)");
    analyze->add_option("--alpha", analyze_opts.alpha, "significance level for the F tests");
    analyze->add_option("--json", analyze_opts.json_path,
                        "write the full-precision JSON report to FILE");

    SimulateOptions sim_opts;
    auto* simulate =
        app.add_subcommand("simulate", "Monte Carlo checks of the estimators and F tests");
    simulate->add_option("--m", sim_opts.m, "number of laboratories");
    simulate->add_option("--x", sim_opts.doses, "design dose value (repeatable)");
    simulate->add_option("--dose-reps", sim_opts.dose_replicates, "replicates per dose value");
    simulate->add_option("--design-file", sim_opts.design_file,
                         "file with whitespace-separated design doses");
    simulate->add_flag("--center,!--no-center", sim_opts.center,
                       "center the design vector (default: on)");
    simulate->add_option("--a0", sim_opts.params.a0, "true intercept");
    simulate->add_option("--b0", sim_opts.params.b0, "true slope");
    simulate->add_option("--sigma-a", sim_opts.params.sigma_A, "sd of lab intercept effects");
    simulate->add_option("--sigma-b", sim_opts.params.sigma_B, "sd of lab slope effects");
    simulate->add_option("--sigma-e", sim_opts.params.sigma_E, "residual sd");
    simulate->add_option("--reps", sim_opts.reps,
                         "replications (default: 20000 mean-squares, 10000 size, 2000 power)");
    simulate->add_option("--seed", sim_opts.seed, "RNG seed");
    simulate->add_option("--mode", sim_opts.mode, "mean-squares, size or power")
        ->check(CLI::IsMember({"mean-squares", "size", "power"}));
    simulate->add_option("--test", sim_opts.test, "regression, intercepts or slopes")
        ->check(CLI::IsMember({"regression", "intercepts", "slopes"}));
    simulate->add_option("--alpha", sim_opts.alpha, "significance level");
    simulate->add_option("--grid", sim_opts.grid, "parameter grid for power mode (repeatable)");
    simulate->add_flag("--check", sim_opts.check, "exit 3 when a band check fails");

    ProfileOptions profile_opts;
    auto* profile = app.add_subcommand("profile", "emit a tau2(x) CSV from a JSON report");
    profile->add_option("report", profile_opts.report_path, "JSON report from analyze --json")
        ->required();
    profile->add_option("--x", profile_opts.query_x, "additional query dose (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitIoOrParse;
    }

    if (analyze->parsed()) {
        analyze_opts.spec.dose_transform = *ingest::parse_dose_transform(dose_transform);
        analyze_opts.spec.response_transform = *ingest::parse_response_transform(response_transform);
        analyze_opts.spec.center_doses = analyze_center;
        return cmd_analyze(analyze_opts, std::cout, std::cerr);
    }
    if (simulate->parsed()) {
        return cmd_simulate(sim_opts, std::cout, std::cerr);
    }
    if (profile->parsed()) {
        return cmd_profile(profile_opts, std::cout, std::cerr);
    }
    return kExitIoOrParse;
}

}  // namespace labline::cli
