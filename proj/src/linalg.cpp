#include "chebrec/linalg.hpp"

#include <cmath>
#include <utility>

#include "chebrec/errors.hpp"

namespace chebrec {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {
    if (rows < 0 || cols < 0) throw config_error("Matrix: negative dimensions");
}

std::span<double> Matrix::row(int r) {
    return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
}

std::span<const double> Matrix::row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
}

Matrix Matrix::select_columns(std::span<const int> columns) const {
    Matrix out(rows_, static_cast<int>(columns.size()));
    for (int c = 0; c < out.cols(); ++c) {
        const int src = columns[static_cast<std::size_t>(c)];
        if (src < 0 || src >= cols_) throw config_error("Matrix::select_columns: index out of range");
        for (int r = 0; r < rows_; ++r) out(r, c) = (*this)(r, src);
    }
    return out;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
    if (static_cast<int>(x.size()) != a.cols())
        throw config_error("multiply: size mismatch");
    std::vector<double> y(static_cast<std::size_t>(a.rows()), 0.0);
    for (int r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        const auto row = a.row(r);
        for (int c = 0; c < a.cols(); ++c) s += row[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = s;
    }
    return y;
}

std::vector<double> multiply_transpose(const Matrix& a, std::span<const double> x) {
    if (static_cast<int>(x.size()) != a.rows())
        throw config_error("multiply_transpose: size mismatch");
    std::vector<double> y(static_cast<std::size_t>(a.cols()), 0.0);
    for (int r = 0; r < a.rows(); ++r) {
        const auto row = a.row(r);
        const double xr = x[static_cast<std::size_t>(r)];
        for (int c = 0; c < a.cols(); ++c) y[static_cast<std::size_t>(c)] += row[static_cast<std::size_t>(c)] * xr;
    }
    return y;
}

LuFactorization::LuFactorization(const Matrix& a, double pivot_tol) {
    if (a.rows() != a.cols()) throw config_error("LuFactorization: matrix not square");
    n_ = a.rows();
    lu_.resize(static_cast<std::size_t>(n_) * n_);
    piv_.resize(static_cast<std::size_t>(n_));
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c) lu_[static_cast<std::size_t>(r) * n_ + c] = a(r, c);

    double scale = 0.0;
    for (double v : lu_) scale = std::max(scale, std::abs(v));
    const double threshold = pivot_tol * std::max(scale, 1.0);

    auto at = [this](int r, int c) -> double& { return lu_[static_cast<std::size_t>(r) * n_ + c]; };

    for (int k = 0; k < n_; ++k) {
        int p = k;
        double best = std::abs(at(k, k));
        for (int r = k + 1; r < n_; ++r) {
            const double v = std::abs(at(r, k));
            if (v > best) { best = v; p = r; }
        }
        piv_[static_cast<std::size_t>(k)] = p;
        if (best <= threshold) { singular_ = true; return; }
        if (p != k) {
            for (int c = 0; c < n_; ++c) std::swap(at(k, c), at(p, c));
            pivot_sign_ = -pivot_sign_;
        }
        const double inv = 1.0 / at(k, k);
        for (int r = k + 1; r < n_; ++r) {
            const double f = at(r, k) * inv;
            at(r, k) = f;
            for (int c = k + 1; c < n_; ++c) at(r, c) -= f * at(k, c);
        }
    }
}

LuFactorization LuFactorization::from_packed(int n, std::vector<double> packed,
                                             std::vector<int> pivot_rows) {
    if (n < 0 || packed.size() != static_cast<std::size_t>(n) * n ||
        pivot_rows.size() != static_cast<std::size_t>(n))
        throw config_error("LuFactorization::from_packed: inconsistent sizes");
    LuFactorization f;
    f.n_ = n;
    f.lu_ = std::move(packed);
    f.piv_ = std::move(pivot_rows);
    for (int k = 0; k < n; ++k) {
        const int p = f.piv_[static_cast<std::size_t>(k)];
        if (p < k || p >= n) throw config_error("LuFactorization::from_packed: bad pivot row");
        if (p != k) f.pivot_sign_ = -f.pivot_sign_;
    }
    return f;
}

double LuFactorization::determinant() const {
    if (singular_) return 0.0;
    double d = pivot_sign_;
    for (int k = 0; k < n_; ++k) d *= lu_[static_cast<std::size_t>(k) * n_ + k];
    return d;
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
    if (singular_) throw numerical_error("LuFactorization::solve: singular matrix");
    if (static_cast<int>(b.size()) != n_) throw config_error("LuFactorization::solve: size mismatch");
    std::vector<double> x(b.begin(), b.end());
    for (int k = 0; k < n_; ++k) {
        const int p = piv_[static_cast<std::size_t>(k)];
        if (p != k) std::swap(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(p)]);
    }
    // forward: L y = P b (unit diagonal)
    for (int r = 1; r < n_; ++r) {
        double s = x[static_cast<std::size_t>(r)];
        for (int c = 0; c < r; ++c) s -= lu_[static_cast<std::size_t>(r) * n_ + c] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = s;
    }
    // backward: U x = y
    for (int r = n_ - 1; r >= 0; --r) {
        double s = x[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n_; ++c) s -= lu_[static_cast<std::size_t>(r) * n_ + c] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = s / lu_[static_cast<std::size_t>(r) * n_ + r];
    }
    return x;
}

std::vector<double> LuFactorization::solve_transpose(std::span<const double> b) const {
    if (singular_) throw numerical_error("LuFactorization::solve_transpose: singular matrix");
    if (static_cast<int>(b.size()) != n_) throw config_error("LuFactorization::solve_transpose: size mismatch");
    // A^T = (P^T L U)^T = U^T L^T P, so solve U^T z = b, L^T w = z, x = P^T w.
    std::vector<double> x(b.begin(), b.end());
    for (int r = 0; r < n_; ++r) {
        double s = x[static_cast<std::size_t>(r)];
        for (int c = 0; c < r; ++c) s -= lu_[static_cast<std::size_t>(c) * n_ + r] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = s / lu_[static_cast<std::size_t>(r) * n_ + r];
    }
    for (int r = n_ - 1; r >= 0; --r) {
        double s = x[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n_; ++c) s -= lu_[static_cast<std::size_t>(c) * n_ + r] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = s;
    }
    for (int k = n_ - 1; k >= 0; --k) {
        const int p = piv_[static_cast<std::size_t>(k)];
        if (p != k) std::swap(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(p)]);
    }
    return x;
}

}  // namespace chebrec
