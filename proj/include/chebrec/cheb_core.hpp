#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chebrec/linalg.hpp"

namespace chebrec {

enum class SystemKind { polynomial, trigonometric, exponential, custom };

[[nodiscard]] std::string to_string(SystemKind kind);
[[nodiscard]] SystemKind system_kind_from_string(const std::string& name);

/// Controls the randomized Chebyshev-property check run at construction:
/// collocation determinants over random increasing pointsets must be uniformly
/// nonzero and of constant sign.
struct ValidationOptions {
    int pointsets = 100;
    double det_tol = 1e-12;  ///< minimum |det| after row equilibration
    unsigned long long seed = 0x9e3779b97f4a7c15ull;
};

/// An n-dimensional Chebyshev system on [-1,1] whose first element is the
/// constant function 1. Immutable and cheap to copy.
class ChebyshevSystem {
public:
    /// (basis index in [0,n), x) -> v_j(x).
    using Evaluator = std::function<double(int, double)>;

    [[nodiscard]] int dimension() const noexcept { return n_; }
    [[nodiscard]] SystemKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::vector<double>& parameters() const noexcept { return params_; }

    /// v_j(x) for j in [0, n); v_0 is identically 1.
    [[nodiscard]] double evaluate(int j, double x) const;

    /// Fills out with [v_0(x), ..., v_{n-1}(x)]; out.size() must equal n.
    void moment_into(double x, std::span<double> out) const;

    friend ChebyshevSystem make_system(SystemKind, int, std::vector<double>,
                                       const ValidationOptions&);
    friend ChebyshevSystem make_custom_system(int, Evaluator, const ValidationOptions&);

private:
    ChebyshevSystem(SystemKind kind, int n, std::vector<double> params, Evaluator eval);

    SystemKind kind_ = SystemKind::polynomial;
    int n_ = 0;
    std::vector<double> params_;
    Evaluator eval_;
};

/// Builds one of the built-in families (n >= 3) and runs the randomized
/// Chebyshev check on it. polynomial: Chebyshev polynomials T_0..T_{n-1}.
/// trigonometric: T_{j}(sin(pi x / 2)), a trigonometric family in pi x / 2
/// valid for every n. exponential: {1, e^{r_1 x}, ..., e^{r_{n-1} x}} with
/// distinct nonzero rates from params (default r_j = j). Throws config_error
/// on bad arguments, numerical_error when the check rejects the basis.
[[nodiscard]] ChebyshevSystem make_system(SystemKind kind, int n,
                                          std::vector<double> params = {},
                                          const ValidationOptions& validation = {});

/// Wraps a user-supplied basis; the evaluator must satisfy v_0 == 1. Runs the
/// same randomized check.
[[nodiscard]] ChebyshevSystem make_custom_system(int n, ChebyshevSystem::Evaluator evaluator,
                                                 const ValidationOptions& validation = {});

/// One closed cell of the partition of [-1,1] induced by the augmented grid.
/// Endpoint sample indices are set when that endpoint is a sample point.
struct Subinterval {
    double left = 0.0;
    double right = 0.0;
    std::optional<int> left_sample;
    std::optional<int> right_sample;
};

/// Strictly increasing sample points in [-1,1], plus the augmented partition
/// obtained by adjoining -1 and 1 when they are not already sample points.
class SamplingGrid {
public:
    explicit SamplingGrid(std::vector<double> points);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(points_.size()); }
    [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
    [[nodiscard]] const std::vector<double>& augmented() const noexcept { return augmented_; }

    [[nodiscard]] int subinterval_count() const noexcept { return static_cast<int>(subs_.size()); }
    [[nodiscard]] const Subinterval& subinterval(int k) const { return subs_.at(static_cast<std::size_t>(k)); }
    [[nodiscard]] const std::vector<Subinterval>& subintervals() const noexcept { return subs_; }

    /// Index of x in points() when x is exactly a sample point.
    [[nodiscard]] std::optional<int> sample_index(double x) const;

    /// Index of a subinterval whose closure contains x. Throws config_error
    /// for x outside [-1,1].
    [[nodiscard]] int locate(double x) const;

    /// Copy of this grid with one more sample point in (-1,1); x_new must not
    /// already be a sample point.
    [[nodiscard]] SamplingGrid with_point(double x_new) const;

private:
    std::vector<double> points_;
    std::vector<double> augmented_;
    std::vector<Subinterval> subs_;
};

/// Values v_j(x_i) of the system on the grid, rows j in [0,n), columns
/// i in [0,m). Column i is the moment vector of sample point x_i.
struct CollocationMatrix {
    Matrix values;
    std::vector<double> points;

    [[nodiscard]] int dimension() const noexcept { return values.rows(); }
    [[nodiscard]] int sample_count() const noexcept { return values.cols(); }

    /// n x n gather of the listed columns.
    [[nodiscard]] Matrix submatrix(std::span<const int> support) const {
        return values.select_columns(support);
    }
};

/// Requires m >= n.
[[nodiscard]] CollocationMatrix collocate(const ChebyshevSystem& system, const SamplingGrid& grid);

/// b(x) = [v_0(x), ..., v_{n-1}(x)]; x must lie in [-1,1].
[[nodiscard]] std::vector<double> moment_vector(const ChebyshevSystem& system, double x);

/// All n generalized Lagrange cardinal values at x for n strictly increasing
/// nodes: the unique element of span(system) that is 1 at nodes[i] and 0 at
/// the other nodes, evaluated at x, for each i.
[[nodiscard]] std::vector<double> lagrange_values(const ChebyshevSystem& system,
                                                  std::span<const double> nodes, double x);

/// Single cardinal value; i indexes nodes.
[[nodiscard]] double lagrange_value(const ChebyshevSystem& system,
                                    std::span<const double> nodes, int i, double x);

}  // namespace chebrec
