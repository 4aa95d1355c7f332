#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chebrec {

/// Dense row-major matrix of doubles. Sized for the small systems this
/// library deals with (square factors up to a few tens, point counts up to a
/// few thousand).
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0);

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    [[nodiscard]] std::span<double> row(int r);
    [[nodiscard]] std::span<const double> row(int r) const;

    /// New matrix keeping the listed columns, in the given order.
    [[nodiscard]] Matrix select_columns(std::span<const int> columns) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// y = A x.
[[nodiscard]] std::vector<double> multiply(const Matrix& a, std::span<const double> x);

/// y = A^T x.
[[nodiscard]] std::vector<double> multiply_transpose(const Matrix& a, std::span<const double> x);

/// LU factorization with partial pivoting of a square matrix. Invariant: once
/// constructed with singular() == false, solve and solve_transpose are exact
/// up to roundoff; a near-zero pivot flags the factorization singular instead.
class LuFactorization {
public:
    LuFactorization() = default;

    /// Factors a. Pivots smaller than pivot_tol times the largest absolute
    /// entry of a mark the matrix singular.
    explicit LuFactorization(const Matrix& a, double pivot_tol = 1e-13);

    /// Rebuilds a factorization from serialized state. pivot_rows[k] is the
    /// row swapped into position k at elimination step k.
    static LuFactorization from_packed(int n, std::vector<double> packed,
                                       std::vector<int> pivot_rows);

    [[nodiscard]] bool singular() const noexcept { return singular_; }
    [[nodiscard]] int size() const noexcept { return n_; }

    /// Determinant of the factored matrix; 0 when flagged singular.
    [[nodiscard]] double determinant() const;

    /// Solves A x = b.
    [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;

    /// Solves A^T x = b.
    [[nodiscard]] std::vector<double> solve_transpose(std::span<const double> b) const;

    /// Packed L (unit lower, below diagonal) and U (upper), row-major n*n.
    [[nodiscard]] const std::vector<double>& packed() const noexcept { return lu_; }
    [[nodiscard]] const std::vector<int>& pivot_rows() const noexcept { return piv_; }

private:
    int n_ = 0;
    bool singular_ = false;
    int pivot_sign_ = 1;
    std::vector<double> lu_;
    std::vector<int> piv_;
};

}  // namespace chebrec
