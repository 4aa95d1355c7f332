#include "chebrec/cheb_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "chebrec/errors.hpp"
#include "chebrec/text_format.hpp"
#include "deterministic_rng.hpp"

namespace chebrec {

namespace {

constexpr double kPi = 3.14159265358979323846;

void fill_chebyshev_t(double t, std::span<double> out) {
    const int n = static_cast<int>(out.size());
    out[0] = 1.0;
    if (n > 1) out[1] = t;
    for (int j = 2; j < n; ++j) out[static_cast<std::size_t>(j)] = 2.0 * t * out[static_cast<std::size_t>(j - 1)] - out[static_cast<std::size_t>(j - 2)];
}

/// Rejects non-Chebyshev bases: over random increasing pointsets the
/// equilibrated collocation determinant must stay above det_tol in magnitude
/// and keep one sign. Points are stratified (one per cell of width 2/n, with
/// a quarter-cell guard gap) so that valid bases cannot fail by clustering.
void run_chebyshev_check(const ChebyshevSystem& system, const ValidationOptions& opts) {
    const int n = system.dimension();
    std::mt19937_64 rng(opts.seed);
    std::vector<double> pts(static_cast<std::size_t>(n));
    std::vector<double> col(static_cast<std::size_t>(n));
    const double w = 2.0 / n;
    int first_sign = 0;
    for (int trial = 0; trial < opts.pointsets; ++trial) {
        for (int i = 0; i < n; ++i)
            pts[static_cast<std::size_t>(i)] = -1.0 + w * (i + 0.125 + 0.75 * detail::uniform01(rng));
        Matrix a(n, n);
        for (int i = 0; i < n; ++i) {
            system.moment_into(pts[static_cast<std::size_t>(i)], col);
            for (int j = 0; j < n; ++j) a(j, i) = col[static_cast<std::size_t>(j)];
        }
        if (std::abs(a(0, 0) - 1.0) > 1e-12)
            throw numerical_error("ChebyshevSystem: first basis function is not the constant 1");
        for (int j = 0; j < n; ++j) {
            double rowmax = 0.0;
            for (int i = 0; i < n; ++i) rowmax = std::max(rowmax, std::abs(a(j, i)));
            if (rowmax == 0.0)
                throw numerical_error("ChebyshevSystem: basis function " + std::to_string(j + 1) +
                                      " vanished on a whole pointset; not a Chebyshev system");
            for (int i = 0; i < n; ++i) a(j, i) /= rowmax;
        }
        const double det = LuFactorization(a).determinant();
        if (std::abs(det) <= opts.det_tol)
            throw numerical_error("ChebyshevSystem: collocation determinant " + fmt17(det) +
                                  " below tolerance on a random pointset; not a Chebyshev system");
        const int sign = det > 0.0 ? 1 : -1;
        if (first_sign == 0) first_sign = sign;
        else if (sign != first_sign)
            throw numerical_error("ChebyshevSystem: collocation determinant changed sign across "
                                  "random pointsets; not a Chebyshev system");
    }
}

}  // namespace

std::string to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::polynomial: return "polynomial";
        case SystemKind::trigonometric: return "trigonometric";
        case SystemKind::exponential: return "exponential";
        case SystemKind::custom: return "custom";
    }
    throw config_error("to_string: unknown SystemKind");
}

SystemKind system_kind_from_string(const std::string& name) {
    if (name == "polynomial") return SystemKind::polynomial;
    if (name == "trigonometric") return SystemKind::trigonometric;
    if (name == "exponential") return SystemKind::exponential;
    if (name == "custom") return SystemKind::custom;
    throw config_error("system_kind_from_string: unknown kind '" + name + "'");
}

ChebyshevSystem::ChebyshevSystem(SystemKind kind, int n, std::vector<double> params, Evaluator eval)
    : kind_(kind), n_(n), params_(std::move(params)), eval_(std::move(eval)) {}

double ChebyshevSystem::evaluate(int j, double x) const {
    if (j < 0 || j >= n_) throw config_error("ChebyshevSystem::evaluate: index out of range");
    switch (kind_) {
        case SystemKind::polynomial:
        case SystemKind::trigonometric: {
            std::vector<double> buf(static_cast<std::size_t>(j + 1));
            const double t = kind_ == SystemKind::polynomial ? x : std::sin(kPi * x / 2.0);
            fill_chebyshev_t(t, buf);
            return buf[static_cast<std::size_t>(j)];
        }
        case SystemKind::exponential:
            return j == 0 ? 1.0 : std::exp(params_[static_cast<std::size_t>(j - 1)] * x);
        case SystemKind::custom:
            return eval_(j, x);
    }
    throw config_error("ChebyshevSystem::evaluate: unknown kind");
}

void ChebyshevSystem::moment_into(double x, std::span<double> out) const {
    if (static_cast<int>(out.size()) != n_)
        throw config_error("ChebyshevSystem::moment_into: output size mismatch");
    switch (kind_) {
        case SystemKind::polynomial:
            fill_chebyshev_t(x, out);
            return;
        case SystemKind::trigonometric:
            fill_chebyshev_t(std::sin(kPi * x / 2.0), out);
            return;
        case SystemKind::exponential:
            out[0] = 1.0;
            for (int j = 1; j < n_; ++j)
                out[static_cast<std::size_t>(j)] = std::exp(params_[static_cast<std::size_t>(j - 1)] * x);
            return;
        case SystemKind::custom:
            for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(j)] = eval_(j, x);
            return;
    }
    throw config_error("ChebyshevSystem::moment_into: unknown kind");
}

ChebyshevSystem make_system(SystemKind kind, int n, std::vector<double> params,
                            const ValidationOptions& validation) {
    if (n < 3) throw config_error("make_system: dimension must be at least 3");
    if (kind == SystemKind::custom)
        throw config_error("make_system: use make_custom_system for custom bases");
    if (kind != SystemKind::exponential && !params.empty())
        throw config_error("make_system: " + to_string(kind) + " basis takes no parameters");
    if (kind == SystemKind::exponential) {
        if (params.empty())
            for (int j = 1; j < n; ++j) params.push_back(static_cast<double>(j));
        if (static_cast<int>(params.size()) != n - 1)
            throw config_error("make_system: exponential basis needs n-1 rates");
        for (double r : params)
            if (!(std::isfinite(r)) || r == 0.0)
                throw config_error("make_system: exponential rates must be finite and nonzero");
        auto sorted = params;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw config_error("make_system: exponential rates must be distinct");
    }
    ChebyshevSystem system(kind, n, std::move(params), nullptr);
    run_chebyshev_check(system, validation);
    return system;
}

ChebyshevSystem make_custom_system(int n, ChebyshevSystem::Evaluator evaluator,
                                   const ValidationOptions& validation) {
    if (n < 3) throw config_error("make_custom_system: dimension must be at least 3");
    if (!evaluator) throw config_error("make_custom_system: null evaluator");
    ChebyshevSystem system(SystemKind::custom, n, {}, std::move(evaluator));
    run_chebyshev_check(system, validation);
    return system;
}

SamplingGrid::SamplingGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw config_error("SamplingGrid: no sample points");
    for (double x : points_)
        if (!std::isfinite(x) || x < -1.0 || x > 1.0)
            throw config_error("SamplingGrid: sample point outside [-1,1]");
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (!(points_[i - 1] < points_[i]))
            throw config_error("SamplingGrid: sample points must be strictly increasing");

    const bool has_left = points_.front() == -1.0;
    const bool has_right = points_.back() == 1.0;
    if (!has_left) augmented_.push_back(-1.0);
    augmented_.insert(augmented_.end(), points_.begin(), points_.end());
    if (!has_right) augmented_.push_back(1.0);

    const int offset = has_left ? 0 : 1;  // augmented_[offset + i] == points_[i]
    const int m = size();
    auto sample_of = [&](int aug_index) -> std::optional<int> {
        const int i = aug_index - offset;
        if (i >= 0 && i < m) return i;
        return std::nullopt;
    };
    for (std::size_t k = 0; k + 1 < augmented_.size(); ++k) {
        Subinterval s;
        s.left = augmented_[k];
        s.right = augmented_[k + 1];
        s.left_sample = sample_of(static_cast<int>(k));
        s.right_sample = sample_of(static_cast<int>(k + 1));
        subs_.push_back(s);
    }
}

std::optional<int> SamplingGrid::sample_index(double x) const {
    const auto it = std::lower_bound(points_.begin(), points_.end(), x);
    if (it != points_.end() && *it == x) return static_cast<int>(it - points_.begin());
    return std::nullopt;
}

int SamplingGrid::locate(double x) const {
    if (!(x >= -1.0 && x <= 1.0)) throw config_error("SamplingGrid::locate: x outside [-1,1]");
    const auto it = std::upper_bound(augmented_.begin(), augmented_.end(), x);
    int k = static_cast<int>(it - augmented_.begin()) - 1;
    k = std::clamp(k, 0, subinterval_count() - 1);
    return k;
}

SamplingGrid SamplingGrid::with_point(double x_new) const {
    if (!(x_new > -1.0 && x_new < 1.0))
        throw config_error("SamplingGrid::with_point: new point must lie in (-1,1)");
    if (sample_index(x_new))
        throw config_error("SamplingGrid::with_point: point already in the grid");
    std::vector<double> pts = points_;
    pts.insert(std::upper_bound(pts.begin(), pts.end(), x_new), x_new);
    return SamplingGrid(std::move(pts));
}

CollocationMatrix collocate(const ChebyshevSystem& system, const SamplingGrid& grid) {
    const int n = system.dimension();
    const int m = grid.size();
    if (m < n) throw config_error("collocate: need at least as many sample points as basis functions");
    CollocationMatrix cm{Matrix(n, m), grid.points()};
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) {
        system.moment_into(grid.points()[static_cast<std::size_t>(i)], col);
        for (int j = 0; j < n; ++j) cm.values(j, i) = col[static_cast<std::size_t>(j)];
    }
    return cm;
}

std::vector<double> moment_vector(const ChebyshevSystem& system, double x) {
    if (!(x >= -1.0 && x <= 1.0)) throw config_error("moment_vector: x outside [-1,1]");
    std::vector<double> b(static_cast<std::size_t>(system.dimension()));
    system.moment_into(x, b);
    return b;
}

std::vector<double> lagrange_values(const ChebyshevSystem& system,
                                    std::span<const double> nodes, double x) {
    const int n = system.dimension();
    if (static_cast<int>(nodes.size()) != n)
        throw config_error("lagrange_values: need exactly n nodes");
    for (int i = 1; i < n; ++i)
        if (!(nodes[static_cast<std::size_t>(i - 1)] < nodes[static_cast<std::size_t>(i)]))
            throw config_error("lagrange_values: nodes must be strictly increasing");
    Matrix b(n, n);
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        system.moment_into(nodes[static_cast<std::size_t>(i)], col);
        for (int j = 0; j < n; ++j) b(j, i) = col[static_cast<std::size_t>(j)];
    }
    const LuFactorization lu(b);
    if (lu.singular())
        throw numerical_error("lagrange_values: singular collocation matrix at the given nodes");
    return lu.solve(moment_vector(system, x));
}

double lagrange_value(const ChebyshevSystem& system, std::span<const double> nodes, int i,
                      double x) {
    if (i < 0 || i >= static_cast<int>(nodes.size()))
        throw config_error("lagrange_value: node index out of range");
    return lagrange_values(system, nodes, x)[static_cast<std::size_t>(i)];
}

}  // namespace chebrec
