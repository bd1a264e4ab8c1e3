// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "labline/ingest.hpp"
#include "labline/sim.hpp"

namespace labline::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIoOrParse = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCheckFailed = 3;

struct AnalyzeOptions {
    std::string csv_path;
    ingest::TransformSpec spec;
    double alpha = 0.05;
    std::string json_path;  // empty: no JSON output
};

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err);

struct SimulateOptions {
    std::size_t m = 5;
    std::vector<double> doses;        // design dose values (distinct)
    std::size_t dose_replicates = 1;  // replication per dose value
    std::string design_file;          // alternative: whitespace-separated x values
    bool center = true;
    sim::ModelParams params;
    std::uint64_t reps = 0;  // 0: mode-dependent default
    std::uint64_t seed = 1;
    std::string mode = "mean-squares";  // mean-squares | size | power
    std::string test = "slopes";        // regression | intercepts | slopes
    double alpha = 0.05;
    std::vector<double> grid = {0.0, 0.2, 0.4, 0.8};
    bool check = false;
};

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

struct ProfileOptions {
    std::string report_path;
    std::vector<double> query_x;
};

int cmd_profile(const ProfileOptions& opts, std::ostream& out, std::ostream& err);

// Argument parsing and dispatch; returns the process exit code.
int run_main(int argc, char** argv);

}  // namespace labline::cli
