// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace labline {

// Dense row-major matrix of doubles, sized once at construction.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Balanced interlaboratory table after transforms: every lab shares one
// centered design vector x, and y(i, j) is lab i's response at x[j].
struct Dataset {
    std::vector<std::string> labs;  // lab ids in order of first appearance (m)
    std::vector<double> x;          // centered design vector, ascending (n)
    Matrix y;                       // m x n responses

    std::size_t lab_count() const noexcept { return labs.size(); }
    std::size_t obs_per_lab() const noexcept { return x.size(); }
};

}  // namespace labline
