#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <vector>

#include "axel/common.hpp"

namespace axel {

// Dense row-major 2-D double matrix. Plain value type; the autodiff layer
// wraps it, metrics and simulators use it directly.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }

    int size() const { return rows * cols; }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool all_finite() const {
        for (double v : data) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows_init) {
        const int r = static_cast<int>(rows_init.size());
        const int c = r > 0 ? static_cast<int>(rows_init.begin()->size()) : 0;
        Matrix m(r, c);
        int i = 0;
        for (const auto& row : rows_init) {
            if (static_cast<int>(row.size()) != c)
                throw DimensionError("from_rows: ragged initializer");
            int j = 0;
            for (double v : row) m.at(i, j++) = v;
            ++i;
        }
        return m;
    }
};

inline double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return std::sqrt(s);
}

}  // namespace axel
