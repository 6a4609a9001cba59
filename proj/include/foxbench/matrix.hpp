#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace foxbench {

// Dense row-major matrix of 64-bit floats.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> values);

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row_ptr(std::size_t i) { return data.data() + i * cols; }
    const double* row_ptr(std::size_t i) const { return data.data() + i * cols; }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

Matrix relu(const Matrix& x);
// Indicator of x > 0; the subgradient at exactly 0 is taken as 0.
Matrix relu_grad(const Matrix& x);

// Row-wise softmax with max shift; every output row sums to 1.
Matrix softmax_rows(const Matrix& x);
// Numerically stable logistic function, values in (0,1).
Matrix sigmoid(const Matrix& x);

// Throws ShapeError (message names both shapes) unless a and b match.
void require_same_shape(const Matrix& a, const Matrix& b, const char* where);

}  // namespace foxbench
