#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace medguard {

using Vector = std::vector<double>;

// Dense row-major matrix, just enough for the recurrent cells.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vector data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }
};

inline Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols != v.size()) throw std::invalid_argument("matvec: shape mismatch");
    Vector out(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.data.data() + r * m.cols;
        double s = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) s += row[c] * v[c];
        out[r] = s;
    }
    return out;
}

// out += M^T v, the pullback of matvec through its vector argument.
inline void add_tmatvec(Vector& out, const Matrix& m, const Vector& v) {
    if (m.rows != v.size() || m.cols != out.size()) throw std::invalid_argument("add_tmatvec: shape mismatch");
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.data.data() + r * m.cols;
        const double vr = v[r];
        for (std::size_t c = 0; c < m.cols; ++c) out[c] += row[c] * vr;
    }
}

// grad += dv (outer) x, the pullback through the matrix argument.
inline void add_outer(Matrix& grad, const Vector& dv, const Vector& x) {
    if (grad.rows != dv.size() || grad.cols != x.size()) throw std::invalid_argument("add_outer: shape mismatch");
    for (std::size_t r = 0; r < grad.rows; ++r) {
        double* row = grad.data.data() + r * grad.cols;
        const double d = dv[r];
        for (std::size_t c = 0; c < grad.cols; ++c) row[c] += d * x[c];
    }
}

inline void add_to(Vector& acc, const Vector& v) {
    if (acc.size() != v.size()) throw std::invalid_argument("add_to: shape mismatch");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

}  // namespace medguard
