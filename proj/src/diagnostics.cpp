#include "chebrec/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "chebrec/errors.hpp"
#include "deterministic_rng.hpp"

namespace chebrec {

std::vector<SupportCandidate> enumerate_supports(const CollocationMatrix& m,
                                                 std::span<const double> b, long long guard) {
    const int n = m.dimension();
    const int cols = m.sample_count();
    if (static_cast<int>(b.size()) != n)
        throw config_error("enumerate_supports: moment vector has wrong length");

    double count = 1.0;  // C(cols, n)
    for (int i = 0; i < n; ++i) count = count * (cols - i) / (i + 1);
    if (count > static_cast<double>(guard))
        throw config_error("enumerate_supports: candidate count exceeds the enumeration guard");

    std::vector<SupportCandidate> out;
    out.reserve(static_cast<std::size_t>(count) + 1);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        SupportCandidate cand;
        cand.support = idx;
        const LuFactorization lu(m.submatrix(idx));
        if (lu.singular()) {
            cand.objective = std::numeric_limits<double>::infinity();
        } else {
            cand.values = lu.solve(b);
            cand.feasible = true;
            for (double v : cand.values) cand.objective += std::abs(v);
        }
        out.push_back(std::move(cand));

        int i = n - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == cols - n + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

std::vector<SparseSolution> ersatz_solver(const ChebyshevSystem& system, const SamplingGrid& grid,
                                          std::span<const double> probes,
                                          const SimplexOptions& opts) {
    const CollocationMatrix colloc = collocate(system, grid);
    std::vector<SparseSolution> out;
    out.reserve(probes.size());
    for (double x : probes) {
        const std::vector<double> b = moment_vector(system, x);
        out.push_back(simplex_solve(to_standard_form(colloc, b), opts));
    }
    return out;
}

MaximizeResult maximize_on_interval(const std::function<double(double)>& f, double a, double b,
                                    const MaximizeOptions& opts) {
    if (!(a < b)) throw config_error("maximize_on_interval: empty interval");
    if (opts.density < 3) throw config_error("maximize_on_interval: density must be at least 3");

    MaximizeResult best{a, f(a)};
    int best_j = 0;
    for (int j = 1; j < opts.density; ++j) {
        const double x = a + (b - a) * j / (opts.density - 1);
        const double v = f(x);
        if (v > best.value) {
            best = {x, v};
            best_j = j;
        }
    }

    double lo = a + (b - a) * std::max(best_j - 1, 0) / (opts.density - 1);
    double hi = a + (b - a) * std::min(best_j + 1, opts.density - 1) / (opts.density - 1);
    constexpr double invphi = 0.61803398874989484820;
    double c = hi - invphi * (hi - lo);
    double d = lo + invphi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    while (hi - lo > opts.x_tol) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = f(d);
        }
    }
    const MaximizeResult refined = fc > fd ? MaximizeResult{c, fc} : MaximizeResult{d, fd};
    return refined.value > best.value ? refined : best;
}

RatioReport rho_norm_ratio(const PiecewiseRecoveryMap& map, const MaximizeOptions& opts) {
    const ChebyshevSystem& system = map.system();
    const int n = map.dimension();
    RatioReport report;
    report.rho = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < map.subinterval_count(); ++k) {
        const SubintervalRecord& rec = map.record(k);
        const std::vector<double> u = rec.factor.solve(moment_vector(system, rec.probe));
        std::vector<double> sigma(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i)
            if (u[static_cast<std::size_t>(i)] != 0.0)
                sigma[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)] > 0.0 ? 1.0 : -1.0;
        // signs are constant on the open subinterval, so the l1 norm extends
        // to the closed one as this linear functional
        auto f = [&](double x) {
            const std::vector<double> w = rec.factor.solve(moment_vector(system, x));
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += sigma[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
            return s;
        };
        const MaximizeResult mr = maximize_on_interval(f, rec.left, rec.right, opts);
        report.per_subinterval.push_back({k, mr.x, mr.value});
        if (mr.value > report.rho) {
            report.rho = mr.value;
            report.argmax_subinterval = k;
            report.argmax_x = mr.x;
        }
    }
    report.mu = 1.0 + report.rho;
    return report;
}

namespace {

/// Piecewise-linear function through random knots with values +-1; its sup
/// norm is exactly 1. Knots always include both endpoints.
class UnitBump {
public:
    UnitBump(std::mt19937_64& rng, int interior_knots) {
        xs_.push_back(-1.0);
        for (int i = 0; i < interior_knots; ++i)
            xs_.push_back(-1.0 + 2.0 * detail::uniform01(rng));
        xs_.push_back(1.0);
        std::sort(xs_.begin(), xs_.end());
        xs_.erase(std::unique(xs_.begin(), xs_.end()), xs_.end());
        for (std::size_t i = 0; i < xs_.size(); ++i)
            ys_.push_back(detail::uniform01(rng) < 0.5 ? -1.0 : 1.0);
    }

    [[nodiscard]] double operator()(double x) const {
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        if (it == xs_.begin()) return ys_.front();
        if (it == xs_.end()) return ys_.back();
        const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
        const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
        return ys_[j - 1] + t * (ys_[j] - ys_[j - 1]);
    }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

}  // namespace

WceAudit wce_audit(const PiecewiseRecoveryMap& map, double epsilon, int trials, int grid_density,
                   unsigned long long seed, const MaximizeOptions& ratio_opts) {
    if (!(epsilon >= 0.0)) throw config_error("wce_audit: epsilon must be nonnegative");
    if (trials < 1) throw config_error("wce_audit: need at least one trial");
    if (grid_density < 2) throw config_error("wce_audit: grid density must be at least 2");

    const ChebyshevSystem& system = map.system();
    const int n = map.dimension();
    const int m = map.sample_count();
    const int g = grid_density;

    WceAudit audit;
    audit.epsilon = epsilon;
    audit.mu = rho_norm_ratio(map, ratio_opts).mu;
    audit.bound = audit.mu * epsilon;
    audit.trials = trials;
    audit.grid_density = g;

    // recovery weights and basis values on the evaluation grid
    Matrix weights(g, m);
    Matrix basis(g, n);
    std::vector<double> probes(static_cast<std::size_t>(g));
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int t = 0; t < g; ++t) {
        const double x = -1.0 + 2.0 * t / (g - 1);
        probes[static_cast<std::size_t>(t)] = x;
        const AsharpRow row = asharp_row(map, x);
        for (std::size_t r = 0; r < row.indices.size(); ++r)
            weights(t, row.indices[r]) = row.values[r];
        system.moment_into(x, col);
        for (int j = 0; j < n; ++j) basis(t, j) = col[static_cast<std::size_t>(j)];
    }

    std::vector<double> coeff(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(m));
    for (int trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + static_cast<unsigned long long>(trial) + 1);
        for (double& c : coeff) c = detail::normal01(rng);
        const UnitBump bump(rng, 3 + static_cast<int>(rng() % 6));

        for (int i = 0; i < m; ++i) {
            const double xi = map.grid().points()[static_cast<std::size_t>(i)];
            system.moment_into(xi, col);
            double v = 0.0;
            for (int j = 0; j < n; ++j) v += coeff[static_cast<std::size_t>(j)] * col[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = v + epsilon * bump(xi);
        }
        for (int t = 0; t < g; ++t) {
            double truth = 0.0;
            for (int j = 0; j < n; ++j) truth += coeff[static_cast<std::size_t>(j)] * basis(t, j);
            truth += epsilon * bump(probes[static_cast<std::size_t>(t)]);
            double rec = 0.0;
            for (int i = 0; i < m; ++i) rec += weights(t, i) * y[static_cast<std::size_t>(i)];
            audit.observed = std::max(audit.observed, std::abs(rec - truth));
        }
    }
    audit.pass = audit.observed <= audit.bound + 1e-8;
    return audit;
}

}  // namespace chebrec
