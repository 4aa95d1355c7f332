#include "chebrec/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <utility>

#include "chebrec/errors.hpp"

namespace chebrec {

namespace {

/// Solves, certifies, and records one subinterval. warm_support may be empty
/// (cold start); a rejected warm basis falls back to cold inside the simplex.
SubintervalRecord solve_subinterval(const CollocationMatrix& colloc, const ChebyshevSystem& system,
                                    const Subinterval& sub, int k,
                                    std::span<const int> warm_support,
                                    const SimplexOptions& opts) {
    SubintervalRecord rec;
    rec.left = sub.left;
    rec.right = sub.right;
    rec.left_sample = sub.left_sample;
    rec.right_sample = sub.right_sample;
    rec.probe = 0.5 * (sub.left + sub.right);

    const std::vector<double> b = moment_vector(system, rec.probe);
    const StandardFormLP lp = to_standard_form(colloc, b);
    SimplexStats stats;
    SparseSolution sol = simplex_solve(lp, opts, &stats, warm_support);
    rec.pivots = stats.phase1_pivots + stats.phase2_pivots;
    rec.warm_started = stats.warm_start_used;

    const CertificateReport cert =
        certificate_check(colloc, sol.support, b, /*expect_nonvanishing=*/true, opts);
    if (!cert.pass)
        throw numerical_error("recovery map: optimality certificate failed on subinterval " +
                                  std::to_string(k + 1) + " (dual norm " +
                                  std::to_string(cert.dual_norm) + ")",
                              k);
    rec.support = std::move(sol.support);
    rec.factor = LuFactorization(colloc.submatrix(rec.support));
    if (rec.factor.singular())
        throw numerical_error("recovery map: singular support submatrix on subinterval " +
                                  std::to_string(k + 1),
                              k);
    return rec;
}

/// Runs job(k) for every subinterval index, optionally across threads.
/// Failures rethrow deterministically: the smallest failing k wins.
template <typename Job>
void for_each_subinterval(int count, int threads, Job job) {
    const int workers = std::clamp(threads, 1, count == 0 ? 1 : count);
    if (workers <= 1) {
        for (int k = 0; k < count; ++k) job(k);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int k = w; k < count; k += workers) {
                try {
                    job(k);
                } catch (...) {
                    errors[static_cast<std::size_t>(k)] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

PiecewiseRecoveryMap::PiecewiseRecoveryMap(ChebyshevSystem system, SamplingGrid grid,
                                           std::vector<SubintervalRecord> records)
    : system_(std::move(system)), grid_(std::move(grid)),
      colloc_(collocate(system_, grid_)), records_(std::move(records)) {
    if (static_cast<int>(records_.size()) != grid_.subinterval_count())
        throw config_error("PiecewiseRecoveryMap: one record per subinterval required");
    for (const auto& rec : records_) {
        if (static_cast<int>(rec.support.size()) != system_.dimension())
            throw config_error("PiecewiseRecoveryMap: support size must equal basis dimension");
        if (rec.factor.size() != system_.dimension() || rec.factor.singular())
            throw config_error("PiecewiseRecoveryMap: invalid support factorization");
    }
}

PiecewiseRecoveryMap build_recovery_map(const ChebyshevSystem& system, const SamplingGrid& grid,
                                        const BuildOptions& opts, BuildStats* stats) {
    const CollocationMatrix colloc = collocate(system, grid);
    const int count = grid.subinterval_count();
    std::vector<SubintervalRecord> records(static_cast<std::size_t>(count));
    for_each_subinterval(count, opts.threads, [&](int k) {
        records[static_cast<std::size_t>(k)] =
            solve_subinterval(colloc, system, grid.subinterval(k), k, {}, opts.simplex);
    });
    if (stats) {
        *stats = BuildStats{};
        for (const auto& rec : records) {
            stats->total_pivots += rec.pivots;
            if (rec.warm_started) ++stats->warm_subintervals;
            else ++stats->cold_subintervals;
        }
    }
    return PiecewiseRecoveryMap(system, grid, std::move(records));
}

AsharpRow asharp_row(const PiecewiseRecoveryMap& map, double x) {
    if (!(x >= -1.0 && x <= 1.0)) throw config_error("asharp_row: x outside [-1,1]");
    AsharpRow row;
    if (const auto i = map.grid().sample_index(x)) {
        row.at_sample = true;
        row.indices = {*i};
        row.values = {1.0};
        return row;
    }
    // at +-1 without a sample there, locate() lands on the adjacent
    // subinterval, whose formula extends continuously
    const int k = map.grid().locate(x);
    const SubintervalRecord& rec = map.record(k);
    row.subinterval = k;
    row.indices = rec.support;
    row.values = rec.factor.solve(moment_vector(map.system(), x));
    return row;
}

double evaluate_asharp(const PiecewiseRecoveryMap& map, int i, double x) {
    if (i < 0 || i >= map.sample_count())
        throw config_error("evaluate_asharp: sample index out of range");
    const AsharpRow row = asharp_row(map, x);
    for (std::size_t t = 0; t < row.indices.size(); ++t)
        if (row.indices[t] == i) return row.values[t];
    return 0.0;
}

double evaluate_delta(const PiecewiseRecoveryMap& map, std::span<const double> y, double x) {
    if (static_cast<int>(y.size()) != map.sample_count())
        throw config_error("evaluate_delta: observation vector has wrong length");
    const AsharpRow row = asharp_row(map, x);
    double s = 0.0;
    for (std::size_t t = 0; t < row.indices.size(); ++t)
        s += row.values[t] * y[static_cast<std::size_t>(row.indices[t])];
    return s;
}

double l1_profile(const PiecewiseRecoveryMap& map, double x) {
    const AsharpRow row = asharp_row(map, x);
    double s = 0.0;
    for (double v : row.values) s += std::abs(v);
    return s;
}

PiecewiseRecoveryMap insert_point_warm(const PiecewiseRecoveryMap& map, double x_new,
                                       InsertStrategy strategy, const BuildOptions& opts,
                                       BuildStats* stats) {
    const SamplingGrid new_grid = map.grid().with_point(x_new);
    if (strategy == InsertStrategy::cold)
        return build_recovery_map(map.system(), new_grid, opts, stats);

    const ChebyshevSystem& system = map.system();
    const CollocationMatrix colloc = collocate(system, new_grid);
    const int p = *new_grid.sample_index(x_new);
    const int split = map.grid().locate(x_new);
    const int count = new_grid.subinterval_count();

    auto shifted = [&](const std::vector<int>& support) {
        std::vector<int> s = support;
        for (int& idx : s)
            if (idx >= p) ++idx;
        return s;
    };

    // Warm basis guess per new subinterval: reuse the (shifted) old support;
    // on the two halves of the split subinterval, swap the far endpoint's
    // index for the new point's. A far endpoint that is not a sample point
    // (the augmented -1 or 1) leaves no index to swap; solve cold there.
    std::vector<std::vector<int>> guesses(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const int old_k = k <= split ? std::min(k, split) : k - 1;
        const SubintervalRecord& old_rec = map.record(old_k);
        std::vector<int> guess = shifted(old_rec.support);
        if (k == split || k == split + 1) {
            const bool left_half = k == split;
            const std::optional<int> far_old =
                left_half ? old_rec.right_sample : old_rec.left_sample;
            if (!far_old) { guesses[static_cast<std::size_t>(k)] = {}; continue; }
            const int far_new = *far_old >= p ? *far_old + 1 : *far_old;
            const auto it = std::find(guess.begin(), guess.end(), far_new);
            if (it == guess.end()) { guesses[static_cast<std::size_t>(k)] = {}; continue; }
            *it = p;
            std::sort(guess.begin(), guess.end());
        }
        guesses[static_cast<std::size_t>(k)] = std::move(guess);
    }

    std::vector<SubintervalRecord> records(static_cast<std::size_t>(count));
    for_each_subinterval(count, opts.threads, [&](int k) {
        records[static_cast<std::size_t>(k)] = solve_subinterval(
            colloc, system, new_grid.subinterval(k), k, guesses[static_cast<std::size_t>(k)],
            opts.simplex);
    });
    if (stats) {
        *stats = BuildStats{};
        for (const auto& rec : records) {
            stats->total_pivots += rec.pivots;
            if (rec.warm_started) ++stats->warm_subintervals;
            else ++stats->cold_subintervals;
        }
    }
    return PiecewiseRecoveryMap(system, new_grid, std::move(records));
}

RecoveredFunction::RecoveredFunction(const PiecewiseRecoveryMap& map, std::vector<double> y)
    : map_(&map), y_(std::move(y)) {
    if (static_cast<int>(y_.size()) != map.sample_count())
        throw config_error("RecoveredFunction: observation vector has wrong length");
}

double RecoveredFunction::operator()(double x) const { return evaluate_delta(*map_, y_, x); }

}  // namespace chebrec
