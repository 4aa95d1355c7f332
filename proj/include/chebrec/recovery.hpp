#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chebrec/l1_simplex.hpp"

namespace chebrec {

/// Everything needed to evaluate the recovery weights on one subinterval of
/// the augmented partition: the optimal support, the LU factors of M_{S_k},
/// and the probe where the l1 program was solved and certified.
struct SubintervalRecord {
    double left = 0.0;
    double right = 0.0;
    std::optional<int> left_sample;   ///< grid index when the endpoint is a sample
    std::optional<int> right_sample;
    double probe = 0.0;               ///< z_k, interior point used for the LP
    std::vector<int> support;         ///< sorted column indices, size n
    LuFactorization factor;           ///< LU of M_{S_k}
    int pivots = 0;                   ///< simplex pivots spent on this subinterval
    bool warm_started = false;
};

struct BuildOptions {
    SimplexOptions simplex;
    int threads = 1;  ///< subintervals are independent; results do not depend on this
};

struct BuildStats {
    int total_pivots = 0;
    int warm_subintervals = 0;
    int cold_subintervals = 0;
};

/// The optimal recovery map for one system + grid: piecewise weights
/// a_sharp_i(x) = row of M_{S_k}^{-1} b(x) on subinterval k, Kronecker delta
/// at the sample points themselves.
class PiecewiseRecoveryMap {
public:
    PiecewiseRecoveryMap(ChebyshevSystem system, SamplingGrid grid,
                         std::vector<SubintervalRecord> records);

    [[nodiscard]] const ChebyshevSystem& system() const noexcept { return system_; }
    [[nodiscard]] const SamplingGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const CollocationMatrix& collocation() const noexcept { return colloc_; }

    [[nodiscard]] int dimension() const noexcept { return system_.dimension(); }
    [[nodiscard]] int sample_count() const noexcept { return grid_.size(); }
    [[nodiscard]] int subinterval_count() const noexcept { return static_cast<int>(records_.size()); }
    [[nodiscard]] const SubintervalRecord& record(int k) const {
        return records_.at(static_cast<std::size_t>(k));
    }

private:
    ChebyshevSystem system_;
    SamplingGrid grid_;
    CollocationMatrix colloc_;
    std::vector<SubintervalRecord> records_;
};

/// Solves and certifies the l1 program on every subinterval (probe =
/// midpoint). Throws numerical_error naming the first offending subinterval
/// when a certificate fails or a support submatrix degenerates.
[[nodiscard]] PiecewiseRecoveryMap build_recovery_map(const ChebyshevSystem& system,
                                                      const SamplingGrid& grid,
                                                      const BuildOptions& opts = {},
                                                      BuildStats* stats = nullptr);

/// All recovery weights active at x: at a sample point the single Kronecker
/// entry, elsewhere the n support entries of subinterval `subinterval`.
struct AsharpRow {
    bool at_sample = false;
    int subinterval = -1;        ///< -1 at sample points
    std::vector<int> indices;    ///< grid columns with (possibly) nonzero weight
    std::vector<double> values;  ///< matching weights
};

[[nodiscard]] AsharpRow asharp_row(const PiecewiseRecoveryMap& map, double x);

/// Single weight a_sharp_i(x); i indexes sample points.
[[nodiscard]] double evaluate_asharp(const PiecewiseRecoveryMap& map, int i, double x);

/// Recovered value (Delta_sharp y)(x) from observations y (length m).
[[nodiscard]] double evaluate_delta(const PiecewiseRecoveryMap& map, std::span<const double> y,
                                    double x);

/// l1 norm of the weight row at x; equals 1 exactly at sample points and is
/// never below 1 (the weights sum to 1).
[[nodiscard]] double l1_profile(const PiecewiseRecoveryMap& map, double x);

enum class InsertStrategy { warm, cold };

/// Recovery map for the grid with one more point. Warm strategy reuses each
/// old support as a simplex starting basis (swapping the far endpoint's index
/// for the new point's on the two split halves); cold rebuilds from scratch.
/// Both return identical maps up to roundoff. The input map is not modified.
[[nodiscard]] PiecewiseRecoveryMap insert_point_warm(const PiecewiseRecoveryMap& map,
                                                     double x_new,
                                                     InsertStrategy strategy = InsertStrategy::warm,
                                                     const BuildOptions& opts = {},
                                                     BuildStats* stats = nullptr);

/// Callable recovered function x -> (Delta_sharp y)(x). Holds a reference to
/// the map, which must outlive it.
class RecoveredFunction {
public:
    RecoveredFunction(const PiecewiseRecoveryMap& map, std::vector<double> y);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] const std::vector<double>& observations() const noexcept { return y_; }

private:
    const PiecewiseRecoveryMap* map_;
    std::vector<double> y_;
};

}  // namespace chebrec
