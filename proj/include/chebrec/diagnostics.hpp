#pragma once

#include <functional>
#include <span>
#include <vector>

#include "chebrec/recovery.hpp"

namespace chebrec {

/// One candidate support from brute-force enumeration. Infeasible candidates
/// (singular M_S) carry an empty value vector and an infinite objective.
struct SupportCandidate {
    std::vector<int> support;
    std::vector<double> values;
    double objective = 0.0;
    bool feasible = false;
};

/// All C(m,n) supports with their basic solutions M_S^{-1} b, in
/// lexicographic order. Refuses to enumerate more than `guard` candidates
/// (config_error); meant for cross-checking the simplex on small problems.
[[nodiscard]] std::vector<SupportCandidate> enumerate_supports(const CollocationMatrix& m,
                                                               std::span<const double> b,
                                                               long long guard = 100000);

/// Independent per-probe l1 solves (always cold). Ground truth for the
/// piecewise map: the objective at probe x must equal l1_profile(map, x).
[[nodiscard]] std::vector<SparseSolution> ersatz_solver(const ChebyshevSystem& system,
                                                        const SamplingGrid& grid,
                                                        std::span<const double> probes,
                                                        const SimplexOptions& opts = {});

struct MaximizeOptions {
    int density = 513;     ///< dense pre-scan points per interval
    double x_tol = 1e-10;  ///< golden-section bracket width at termination
};

struct MaximizeResult {
    double x = 0.0;
    double value = 0.0;
};

/// Deterministic 1-d maximizer: dense scan to bracket, then golden-section.
/// Intended for the continuous per-subinterval functions arising here.
[[nodiscard]] MaximizeResult maximize_on_interval(const std::function<double(double)>& f,
                                                  double a, double b,
                                                  const MaximizeOptions& opts = {});

struct SubintervalMaximum {
    int subinterval = 0;
    double x = 0.0;
    double value = 0.0;
};

/// rho = sup_x |a_sharp(x)|_1 and mu = 1 + rho, with the location of the
/// supremum. Per subinterval the l1 norm is the linear functional with signs
/// frozen at the probe, so closed-interval maximization is exact there.
struct RatioReport {
    double rho = 0.0;
    double mu = 0.0;
    int argmax_subinterval = 0;
    double argmax_x = 0.0;
    std::vector<SubintervalMaximum> per_subinterval;
};

[[nodiscard]] RatioReport rho_norm_ratio(const PiecewiseRecoveryMap& map,
                                         const MaximizeOptions& opts = {});

/// Empirical check of the worst-case error bound mu * epsilon: random
/// ground truths v from the model space plus perturbations of sup norm
/// exactly epsilon, recovered from their sample values and compared on a
/// uniform grid. observed is the largest recovery error seen.
struct WceAudit {
    double epsilon = 0.0;
    double mu = 0.0;
    double bound = 0.0;     ///< mu * epsilon
    double observed = 0.0;
    bool pass = false;      ///< observed <= bound + 1e-8
    int trials = 0;
    int grid_density = 0;
};

[[nodiscard]] WceAudit wce_audit(const PiecewiseRecoveryMap& map, double epsilon, int trials,
                                 int grid_density, unsigned long long seed,
                                 const MaximizeOptions& ratio_opts = {});

}  // namespace chebrec
