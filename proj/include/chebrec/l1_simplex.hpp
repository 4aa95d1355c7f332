#pragma once

#include <span>
#include <vector>

#include "chebrec/cheb_core.hpp"

namespace chebrec {

/// min 1^T c  s.t.  [M | -M] c = b, c >= 0. The minimizer recovers the
/// l1-minimal coefficient vector as a = c[0:m] - c[m:2m].
struct StandardFormLP {
    Matrix constraints;       ///< n x 2m block matrix [M | -M]
    std::vector<double> rhs;  ///< moment vector b, length n

    [[nodiscard]] int sample_count() const noexcept { return constraints.cols() / 2; }
    [[nodiscard]] int dimension() const noexcept { return constraints.rows(); }
};

[[nodiscard]] StandardFormLP to_standard_form(const CollocationMatrix& m,
                                              std::span<const double> b);

/// An n-sparse l1 minimizer: exactly n support indices (sorted, 0-based
/// columns of M) and the corresponding values M_S^{-1} b.
struct SparseSolution {
    std::vector<int> support;
    std::vector<double> values;
    double objective = 0.0;  ///< l1 norm of values
};

struct SimplexOptions {
    double feasibility_tol = 1e-9;    ///< residual bound, relative to max(1, |b|_inf)
    double certificate_tol = 1e-9;    ///< slack allowed on the dual-norm bound
    double nonzero_tol = 1e-12;       ///< below this a solution entry counts as zero
    double reduced_cost_tol = 1e-10;  ///< entering-candidate threshold
    double pivot_tol = 1e-11;         ///< smallest usable tableau pivot
};

struct SimplexStats {
    int phase1_pivots = 0;
    int phase2_pivots = 0;
    bool warm_start_used = false;  ///< warm basis accepted (phase 1 skipped)
};

/// Dense two-phase tableau simplex, Dantzig pricing with a Bland fallback for
/// anti-cycling. When warm_support (n column indices of M with M_S
/// invertible) is given, phase 1 is skipped: signs of M_S^{-1} b pick the
/// feasible orientation of each column. Degenerate optima are resolved
/// deterministically (lowest entering index among ties under Bland's rule).
/// Throws numerical_error on infeasibility or a tripped cycling guard.
[[nodiscard]] SparseSolution simplex_solve(const StandardFormLP& lp,
                                           const SimplexOptions& opts = {},
                                           SimplexStats* stats = nullptr,
                                           std::span<const int> warm_support = {});

/// Outcome of the l1-optimality test for a support S at moment vector b:
/// optimal iff |M_{S^c}^T M_S^{-T} sgn(M_S^{-1} b)|_inf <= 1.
struct CertificateReport {
    double dual_norm = 0.0;
    bool pass = false;
    double margin = 0.0;  ///< 1 - dual_norm; negative when the test fails
};

/// Evaluates the certificate for the given support (size n, M_S invertible).
/// With expect_nonvanishing set, entries of M_S^{-1} b smaller than
/// nonzero_tol fail the check (used off sample points where the interpolation
/// weights of an optimal support cannot vanish).
[[nodiscard]] CertificateReport certificate_check(const CollocationMatrix& m,
                                                  std::span<const int> support,
                                                  std::span<const double> b,
                                                  bool expect_nonvanishing = false,
                                                  const SimplexOptions& opts = {});

/// Pads a set of column indices to exactly n while keeping M_S invertible,
/// preferring the smallest admissible indices. Used when the simplex ends on
/// a degenerate basis touching fewer than n distinct columns.
[[nodiscard]] std::vector<int> complete_support(const CollocationMatrix& m,
                                                std::vector<int> support);

}  // namespace chebrec
