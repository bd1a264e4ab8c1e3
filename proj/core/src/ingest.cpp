// SPDX-License-Identifier: Apache-2.0
#include "labline/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "compensated.hpp"

namespace labline::ingest {

namespace {

constexpr double kDoseEqualityTolerance = 1e-9;
constexpr double kCenteringTolerance = 1e-9;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// Split one CSV line into fields. Double quotes delimit a field; a doubled
// quote inside a quoted field is an escaped quote.
std::vector<std::string> split_csv_line(std::string_view line, const std::string& source,
                                        std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    bool was_quoted = false;

    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? current : std::string(trim(current)));
            current.clear();
            was_quoted = false;
        } else {
            current += c;
        }
    }
    if (in_quotes) {
        throw ParseError(source, line_no, "unterminated quoted field");
    }
    fields.push_back(was_quoted ? current : std::string(trim(current)));
    return fields;
}

double parse_number(std::string_view field, const char* column, const std::string& source,
                    std::size_t line_no) {
    const std::string_view text = trim(field);
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(value)) {
        throw ParseError(source, line_no,
                         std::string("malformed ") + column + " value '" + std::string(field) + "'");
    }
    return value;
}

double transform_dose(double v, DoseTransform t, const std::string& source, std::size_t line) {
    switch (t) {
        case DoseTransform::Log10:
            if (!(v > 0.0)) {
                throw TransformError(source, line,
                                     "log10 dose transform requires dose > 0, got " +
                                         std::to_string(v));
            }
            return std::log10(v);
        case DoseTransform::Identity:
            return v;
    }
    return v;
}

double transform_response(double v, ResponseTransform t, const std::string& source,
                          std::size_t line) {
    switch (t) {
        case ResponseTransform::NaturalLog:
            if (!(v > 0.0)) {
                throw TransformError(source, line,
                                     "ln response transform requires response > 0, got " +
                                         std::to_string(v));
            }
            return std::log(v);
        case ResponseTransform::Log10:
            if (!(v > 0.0)) {
                throw TransformError(source, line,
                                     "log10 response transform requires response > 0, got " +
                                         std::to_string(v));
            }
            return std::log10(v);
        case ResponseTransform::Identity:
            return v;
    }
    return v;
}

double exact_mean(const std::vector<double>& values) {
    detail::CompensatedSum sum;
    for (double v : values) sum.add(v);
    return sum.value() / static_cast<double>(values.size());
}

}  // namespace

RawTable parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    return parse_csv(in, path.string());
}

RawTable parse_csv(std::istream& in, std::string source_name) {
    RawTable table;
    table.source = std::move(source_name);

    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) {
        throw ParseError(table.source, 1, "empty file: expected header 'lab,dose,response'");
    }
    ++line_no;
    if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF') {
        line.erase(0, 3);  // UTF-8 BOM
    }

    const auto header = split_csv_line(line, table.source, line_no);
    int lab_col = -1, dose_col = -1, response_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string_view name = trim(header[i]);
        int* slot = nullptr;
        if (name == "lab") slot = &lab_col;
        else if (name == "dose") slot = &dose_col;
        else if (name == "response") slot = &response_col;
        else throw ParseError(table.source, line_no, "unexpected column '" + std::string(name) + "'");
        if (*slot != -1) {
            throw ParseError(table.source, line_no, "duplicate column '" + std::string(name) + "'");
        }
        *slot = static_cast<int>(i);
    }
    for (const auto& [col, name] :
         {std::pair{lab_col, "lab"}, std::pair{dose_col, "dose"}, std::pair{response_col, "response"}}) {
        if (col == -1) {
            throw ParseError(table.source, line_no, std::string("missing column '") + name + "'");
        }
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;

        const auto fields = split_csv_line(line, table.source, line_no);
        if (fields.size() != header.size()) {
            throw ParseError(table.source, line_no,
                             "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        }

        RawRow row;
        row.line = line_no;
        row.lab_id = fields[static_cast<std::size_t>(lab_col)];
        if (row.lab_id.empty()) {
            throw ParseError(table.source, line_no, "empty lab id");
        }
        row.dose = parse_number(fields[static_cast<std::size_t>(dose_col)], "dose", table.source, line_no);
        row.response =
            parse_number(fields[static_cast<std::size_t>(response_col)], "response", table.source, line_no);
        table.rows.push_back(std::move(row));
    }
    return table;
}

ValidationOutcome validate_balanced(const DatasetCandidate& candidate) {
    ValidationOutcome out;
    auto& violations = out.violations;

    const std::size_t m = candidate.labs.size();
    if (m < 2) {
        violations.push_back({BalanceViolation::Kind::TooFewLabs, "",
                              "at least 2 laboratories required, got " + std::to_string(m)});
    }
    if (m == 0) return out;

    // Per-lab (x, y) pairs sorted by dose; ties keep input order.
    std::vector<std::vector<std::pair<double, double>>> sorted(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& xs = candidate.x_by_lab[i];
        const auto& ys = candidate.y_by_lab[i];
        sorted[i].reserve(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) {
            sorted[i].emplace_back(xs[j], ys[j]);
        }
        std::stable_sort(sorted[i].begin(), sorted[i].end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    // Expected observation count: the most common per-lab count, earliest lab
    // breaking ties.
    std::map<std::size_t, std::size_t> count_freq;
    for (const auto& lab : sorted) ++count_freq[lab.size()];
    std::size_t expected_n = sorted[0].size();
    std::size_t best_freq = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t freq = count_freq[sorted[i].size()];
        if (freq > best_freq) {
            best_freq = freq;
            expected_n = sorted[i].size();
        }
    }

    bool counts_ok = true;
    for (std::size_t i = 0; i < m; ++i) {
        if (sorted[i].size() != expected_n) {
            counts_ok = false;
            violations.push_back({BalanceViolation::Kind::ObservationCount, candidate.labs[i],
                                  "lab '" + candidate.labs[i] + "': " +
                                      std::to_string(sorted[i].size()) + " observations, expected " +
                                      std::to_string(expected_n)});
        }
    }

    const std::size_t n = expected_n;
    if (n < 3) {
        violations.push_back(
            {BalanceViolation::Kind::TooFewObservations, "",
             "at least 3 observations per laboratory required (residual degrees of freedom "
             "m*n - 2m must be positive), got n = " +
                 std::to_string(n)});
    }

    std::vector<double> x;
    if (counts_ok) {
        // Canonical design vector: lab 0's sorted doses.
        x.reserve(n);
        for (const auto& [xv, yv] : sorted[0]) x.push_back(xv);

        for (std::size_t i = 1; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (std::abs(sorted[i][j].first - x[j]) > kDoseEqualityTolerance) {
                    std::ostringstream msg;
                    msg << "lab '" << candidate.labs[i] << "': dose value " << sorted[i][j].first
                        << " differs from lab '" << candidate.labs[0] << "' value " << x[j]
                        << " at sorted position " << j;
                    violations.push_back(
                        {BalanceViolation::Kind::DoseMismatch, candidate.labs[i], msg.str()});
                    break;
                }
            }
        }

        std::size_t distinct = n == 0 ? 0 : 1;
        for (std::size_t j = 1; j < n; ++j) {
            if (x[j] != x[j - 1]) ++distinct;
        }
        if (distinct < 2) {
            violations.push_back({BalanceViolation::Kind::DegenerateDoses, "",
                                  "design needs at least 2 distinct dose values, got " +
                                      std::to_string(distinct)});
        }

        if (n > 0) {
            if (candidate.center_doses) {
                const double mean = exact_mean(x);
                for (double& v : x) v -= mean;
            } else {
                const double mean = exact_mean(x);
                if (std::abs(mean) > kCenteringTolerance) {
                    std::ostringstream msg;
                    msg << "design vector is not centered: mean(x) = " << mean
                        << " exceeds tolerance " << kCenteringTolerance;
                    violations.push_back(
                        {BalanceViolation::Kind::CenteringTolerance, "", msg.str()});
                }
            }
        }
    }

    if (!violations.empty()) return out;

    Dataset data;
    data.labs = candidate.labs;
    data.x = std::move(x);
    data.y = Matrix(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            data.y(i, j) = sorted[i][j].second;
        }
    }
    out.dataset = std::move(data);
    return out;
}

Dataset apply_transforms(const RawTable& raw, const TransformSpec& spec) {
    DatasetCandidate candidate;
    candidate.center_doses = spec.center_doses;
    candidate.source = raw.source;

    std::unordered_map<std::string, std::size_t> lab_index;
    for (const RawRow& row : raw.rows) {
        const double x = transform_dose(row.dose, spec.dose_transform, raw.source, row.line);
        const double y =
            transform_response(row.response, spec.response_transform, raw.source, row.line);

        const auto [it, inserted] = lab_index.try_emplace(row.lab_id, candidate.labs.size());
        if (inserted) {
            candidate.labs.push_back(row.lab_id);
            candidate.x_by_lab.emplace_back();
            candidate.y_by_lab.emplace_back();
        }
        candidate.x_by_lab[it->second].push_back(x);
        candidate.y_by_lab[it->second].push_back(y);
    }

    auto outcome = validate_balanced(candidate);
    if (!outcome.ok()) {
        throw ValidationError(std::move(outcome.violations), raw.source);
    }
    return std::move(*outcome.dataset);
}

std::string_view to_string(DoseTransform t) {
    switch (t) {
        case DoseTransform::Log10: return "log10";
        case DoseTransform::Identity: return "none";
    }
    return "none";
}

std::string_view to_string(ResponseTransform t) {
    switch (t) {
        case ResponseTransform::NaturalLog: return "ln";
        case ResponseTransform::Log10: return "log10";
        case ResponseTransform::Identity: return "none";
    }
    return "none";
}

std::optional<DoseTransform> parse_dose_transform(std::string_view name) {
    if (name == "log10") return DoseTransform::Log10;
    if (name == "none") return DoseTransform::Identity;
    return std::nullopt;
}

std::optional<ResponseTransform> parse_response_transform(std::string_view name) {
    if (name == "ln") return ResponseTransform::NaturalLog;
    if (name == "log10") return ResponseTransform::Log10;
    if (name == "none") return ResponseTransform::Identity;
    return std::nullopt;
}

}  // namespace labline::ingest
