#include "foxbench/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "foxbench/error.hpp"

namespace foxbench {

namespace {

std::string shape_str(const Matrix& m) {
    std::ostringstream s;
    s << m.rows << "x" << m.cols;
    return s.str();
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> values) {
    Matrix m;
    m.rows = values.size();
    m.cols = values.size() ? values.begin()->size() : 0;
    m.data.reserve(m.rows * m.cols);
    for (const auto& row : values) {
        if (row.size() != m.cols) {
            throw ShapeError("from_rows: ragged rows");
        }
        m.data.insert(m.data.end(), row.begin(), row.end());
    }
    return m;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(where) + ": shape mismatch " + shape_str(a) +
                         " vs " + shape_str(b));
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw ShapeError("matmul: inner dimensions differ, " + shape_str(a) + " * " +
                         shape_str(b));
    }
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row_ptr(i);
        double* crow = c.row_ptr(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols; ++j) {
                crow[j] += aik * brow[j];
            }
        }
    }
    return c;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            t(j, i) = m(i, j);
        }
    }
    return t;
}

Matrix relu(const Matrix& x) {
    Matrix y = x;
    for (double& v : y.data) v = std::max(0.0, v);
    return y;
}

Matrix relu_grad(const Matrix& x) {
    Matrix g(x.rows, x.cols);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        g.data[i] = x.data[i] > 0.0 ? 1.0 : 0.0;
    }
    return g;
}

Matrix softmax_rows(const Matrix& x) {
    Matrix y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double* in = x.row_ptr(i);
        double* out = y.row_ptr(i);
        double row_max = in[0];
        for (std::size_t j = 1; j < x.cols; ++j) row_max = std::max(row_max, in[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < x.cols; ++j) {
            out[j] = std::exp(in[j] - row_max);
            sum += out[j];
        }
        for (std::size_t j = 0; j < x.cols; ++j) out[j] /= sum;
    }
    return y;
}

Matrix sigmoid(const Matrix& x) {
    Matrix y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double v = x.data[i];
        if (v >= 0.0) {
            y.data[i] = 1.0 / (1.0 + std::exp(-v));
        } else {
            const double e = std::exp(v);
            y.data[i] = e / (1.0 + e);
        }
    }
    return y;
}

}  // namespace foxbench
