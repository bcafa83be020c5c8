#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "spmld/errors.hpp"

namespace spmld {

// Dense row-major double matrix. Sizes in this project stay around a few
// thousand on a side, so plain loops are enough.
class Matrix {
  public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    Matrix& operator+=(const Matrix& o) {
        require_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    Matrix& operator-=(const Matrix& o) {
        require_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }

    Matrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    double frob2() const {
        double acc = 0.0;
        for (double v : data_) acc += v * v;
        return acc;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

  private:
    void require_shape(const Matrix& o) const {
        if (!same_shape(o)) throw ShapeError("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(Matrix a, double s) { return a *= s; }
inline Matrix operator*(double s, Matrix a) { return a *= s; }

// C = A * B
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

// C = A^T * B
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw ShapeError("matmul_tn: inner dimensions differ");
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
        }
    }
    return c;
}

// C = A * B^T
inline Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw ShapeError("matmul_nt: inner dimensions differ");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(j, k);
            c(i, j) = acc;
        }
    }
    return c;
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeError("hadamard: shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.raw().size(); ++i) c.raw()[i] *= b.raw()[i];
    return c;
}

inline double frob_dot(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeError("frob_dot: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.raw().size(); ++i) acc += a.raw()[i] * b.raw()[i];
    return acc;
}

// Columns of `a` selected by `idx`, in the given order.
inline Matrix gather_columns(const Matrix& a, const std::vector<std::size_t>& idx) {
    Matrix c(a.rows(), idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        if (idx[j] >= a.cols()) throw RangeError("gather_columns: index out of range");
        for (std::size_t r = 0; r < a.rows(); ++r) c(r, j) = a(r, idx[j]);
    }
    return c;
}

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // column i pairs with values[i]
};

// Cyclic Jacobi for symmetric matrices. Quadratic convergence; plenty for the
// Gram matrices (a few hundred on a side) this project feeds it.
inline EigenDecomposition jacobi_eigh(const Matrix& input, int max_sweeps = 64) {
    if (input.rows() != input.cols()) throw ShapeError("jacobi_eigh: matrix not square");
    const std::size_t n = input.rows();
    Matrix a = input;
    Matrix v = Matrix::identity(n);

    auto off_diag2 = [&]() {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r + 1; c < n; ++c) acc += a(r, c) * a(r, c);
        return acc;
    };

    const double tol = 1e-28 * std::max(1.0, a.frob2());
    for (int sweep = 0; sweep < max_sweeps && off_diag2() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i);
                    const double aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

// Solves A X = B for symmetric positive definite A via Cholesky.
inline Matrix solve_spd(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols()) throw ShapeError("solve_spd: matrix not square");
    if (a.rows() != b.rows()) throw ShapeError("solve_spd: rhs row count mismatch");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (diag <= 0.0) throw NumericalError("solve_spd: matrix not positive definite");
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
            l(i, j) = acc / l(j, j);
        }
    }
    Matrix x = b;
    for (std::size_t col = 0; col < b.cols(); ++col) {
        for (std::size_t i = 0; i < n; ++i) {  // forward: L y = b
            double acc = x(i, col);
            for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * x(k, col);
            x(i, col) = acc / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {  // backward: L^T x = y
            double acc = x(ii, col);
            for (std::size_t k = ii + 1; k < n; ++k) acc -= l(k, ii) * x(k, col);
            x(ii, col) = acc / l(ii, ii);
        }
    }
    return x;
}

struct TruncatedSvd {
    Matrix u;                   // rows(a) x k
    std::vector<double> sigma;  // k values, descending, >= 0
    Matrix vt;                  // k x cols(a)
};

// Rank-k SVD through the eigendecomposition of the smaller Gram matrix.
// Fine for a warm start; tiny singular values are zeroed rather than inverted.
inline TruncatedSvd truncated_svd(const Matrix& a, std::size_t k) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (k < 1 || k > std::min(m, n))
        throw ConfigError("truncated_svd: rank outside [1, min(rows, cols)]");

    TruncatedSvd out;
    out.sigma.assign(k, 0.0);

    if (m <= n) {
        EigenDecomposition eig = jacobi_eigh(matmul_nt(a, a));
        out.u = Matrix(m, k);
        out.vt = Matrix(k, n);
        double sig_max = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            sig_max = std::max(sig_max, std::sqrt(std::max(0.0, eig.values[j])));
        for (std::size_t j = 0; j < k; ++j) {
            const double sigma = std::sqrt(std::max(0.0, eig.values[j]));
            out.sigma[j] = sigma;
            for (std::size_t i = 0; i < m; ++i) out.u(i, j) = eig.vectors(i, j);
            if (sigma > 1e-12 * std::max(1.0, sig_max)) {
                for (std::size_t c = 0; c < n; ++c) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < m; ++i) acc += eig.vectors(i, j) * a(i, c);
                    out.vt(j, c) = acc / sigma;
                }
            }
        }
    } else {
        EigenDecomposition eig = jacobi_eigh(matmul_tn(a, a));
        out.u = Matrix(m, k);
        out.vt = Matrix(k, n);
        double sig_max = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            sig_max = std::max(sig_max, std::sqrt(std::max(0.0, eig.values[j])));
        for (std::size_t j = 0; j < k; ++j) {
            const double sigma = std::sqrt(std::max(0.0, eig.values[j]));
            out.sigma[j] = sigma;
            for (std::size_t c = 0; c < n; ++c) out.vt(j, c) = eig.vectors(c, j);
            if (sigma > 1e-12 * std::max(1.0, sig_max)) {
                for (std::size_t i = 0; i < m; ++i) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < n; ++c) acc += a(i, c) * eig.vectors(c, j);
                    out.u(i, j) = acc / sigma;
                }
            }
        }
    }
    return out;
}

}  // namespace spmld
