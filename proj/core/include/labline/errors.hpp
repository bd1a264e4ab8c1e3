// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace labline {

// Failure while reading an input file; what() carries "file:line: message".
class ParseError : public std::runtime_error {
public:
    ParseError(std::string file, std::size_t line, const std::string& message)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

// A dose/response transform could not be applied (e.g. log of a non-positive value).
class TransformError : public std::runtime_error {
public:
    TransformError(std::string file, std::size_t line, const std::string& message)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

// One reason a candidate table is not a valid balanced design.
struct BalanceViolation {
    enum class Kind {
        TooFewLabs,
        TooFewObservations,
        ObservationCount,
        DoseMismatch,
        DegenerateDoses,
        CenteringTolerance,
    };

    Kind kind;
    std::string lab;  // offending lab id; empty for design-wide violations
    std::string message;
};

// Raised when a pipeline step receives data that failed balance validation.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<BalanceViolation> violations, std::string source = {})
        : std::runtime_error(summarize(source, violations)), violations_(std::move(violations)) {}

    const std::vector<BalanceViolation>& violations() const noexcept { return violations_; }

private:
    static std::string summarize(const std::string& source,
                                 const std::vector<BalanceViolation>& violations) {
        std::string text =
            source.empty() ? "design validation failed:" : source + ": design validation failed:";
        for (const auto& v : violations) {
            text += "\n  - ";
            text += v.message;
        }
        return text;
    }

    std::vector<BalanceViolation> violations_;
};

// A design whose dose spread is zero (S_xxL = 0), so no slope is identifiable.
class DegenerateDesignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An F statistic whose denominator mean square is zero.
class UndefinedTestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace labline
