// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labline/dataset.hpp"
#include "labline/errors.hpp"

namespace labline::ingest {

enum class DoseTransform { Log10, Identity };
enum class ResponseTransform { NaturalLog, Log10, Identity };

struct TransformSpec {
    DoseTransform dose_transform = DoseTransform::Identity;
    bool center_doses = true;
    ResponseTransform response_transform = ResponseTransform::Identity;
};

// One data row exactly as read from the file, before any transform.
struct RawRow {
    std::string lab_id;
    double dose = 0.0;
    double response = 0.0;
    std::size_t line = 0;  // 1-based source line, for diagnostics
};

struct RawTable {
    std::vector<RawRow> rows;  // file order
    std::string source;        // file name for diagnostics
};

// CSV input: UTF-8, header naming the columns `lab,dose,response` (any column
// order), `.` decimal point, optional double-quoted lab names. Throws
// ParseError with file:line context for anything malformed.
RawTable parse_csv(const std::filesystem::path& path);
RawTable parse_csv(std::istream& in, std::string source_name);

// Transformed per-lab rows, before balance validation. x/y vectors are
// index-paired; validate_balanced sorts each lab's pairs by dose itself.
struct DatasetCandidate {
    std::vector<std::string> labs;
    std::vector<std::vector<double>> x_by_lab;
    std::vector<std::vector<double>> y_by_lab;
    bool center_doses = false;
    std::string source;
};

struct ValidationOutcome {
    std::optional<Dataset> dataset;
    std::vector<BalanceViolation> violations;

    bool ok() const noexcept { return dataset.has_value(); }
};

// Total function: returns either a valid Dataset or the complete list of
// violations, never throws for data reasons.
//
// Checks: >= 2 labs; equal observation counts; identical per-lab dose
// multisets (absolute tolerance 1e-9 after transform; decimal text
// round-trips identically, so this only forgives last-ulp noise); >= 3
// observations per lab (positive residual degrees of freedom); >= 2 distinct
// doses. When center_doses is set, the canonical design vector is re-centered
// by subtracting its exact mean; otherwise |mean(x)| <= 1e-9 is required.
ValidationOutcome validate_balanced(const DatasetCandidate& candidate);

// Transform doses then responses, group rows by lab (order of first
// appearance), and validate balance. Throws TransformError for a log of a
// non-positive value and ValidationError when validate_balanced reports
// violations.
Dataset apply_transforms(const RawTable& raw, const TransformSpec& spec);

std::string_view to_string(DoseTransform t);
std::string_view to_string(ResponseTransform t);
std::optional<DoseTransform> parse_dose_transform(std::string_view name);
std::optional<ResponseTransform> parse_response_transform(std::string_view name);

}  // namespace labline::ingest
