#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rigkit {

// Dense row-major matrix of doubles.  Deliberately minimal; the heavy
// lifting in this library is all small-scale.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {
        if (r < 0 || c < 0) throw std::invalid_argument("matrix: negative dimension");
    }

    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
    double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }

    std::span<const double> row(int r) const {
        return {data.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)};
    }
    std::span<double> row(int r) {
        return {data.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)};
    }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

using EmbeddingMatrix = Matrix;

}  // namespace rigkit
