// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace labline::detail {

// Neumaier-compensated accumulator. Inputs are added in a fixed,
// caller-defined order so totals are reproducible run to run.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace labline::detail
