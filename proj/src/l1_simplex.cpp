#include "chebrec/l1_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chebrec/errors.hpp"

namespace chebrec {

namespace {

/// Dense simplex tableau over columns [M | -M | I | rhs]. Row i always holds
/// the basic variable basis_[i]; rhs stays nonnegative throughout.
class Tableau {
public:
    Tableau(const StandardFormLP& lp, const SimplexOptions& opts)
        : n_(lp.dimension()), nreal_(lp.constraints.cols()), width_(nreal_ + n_ + 1),
          opts_(opts), t_(lp.dimension(), lp.constraints.cols() + lp.dimension() + 1),
          z_(static_cast<std::size_t>(lp.constraints.cols() + lp.dimension() + 1), 0.0),
          basis_(static_cast<std::size_t>(lp.dimension()), -1) {}

    /// Phase-1 initialization: artificial basis, rows flipped so rhs >= 0.
    void init_cold(const StandardFormLP& lp) {
        for (int i = 0; i < n_; ++i) {
            const double flip = lp.rhs[static_cast<std::size_t>(i)] < 0.0 ? -1.0 : 1.0;
            for (int j = 0; j < nreal_; ++j) t_(i, j) = flip * lp.constraints(i, j);
            t_(i, nreal_ + i) = 1.0;
            t_(i, width_ - 1) = flip * lp.rhs[static_cast<std::size_t>(i)];
            basis_[static_cast<std::size_t>(i)] = nreal_ + i;
        }
        rebuild_costs(/*phase1=*/true);
    }

    /// Warm initialization from an oriented basis: columns of M indexed by
    /// support, each flipped to its +/- twin so the basic values come out
    /// nonnegative. Returns false when M_S is singular.
    bool init_warm(const StandardFormLP& lp, const CollocationMatrix& cm,
                   std::span<const int> support) {
        const int m = lp.sample_count();
        const Matrix ms = cm.submatrix(support);
        const LuFactorization lu(ms);
        if (lu.singular()) return false;
        const std::vector<double> u = lu.solve(lp.rhs);

        std::vector<double> sigma(static_cast<std::size_t>(n_));
        for (int r = 0; r < n_; ++r) {
            sigma[static_cast<std::size_t>(r)] = u[static_cast<std::size_t>(r)] < 0.0 ? -1.0 : 1.0;
            const int s = support[static_cast<std::size_t>(r)];
            basis_[static_cast<std::size_t>(r)] = sigma[static_cast<std::size_t>(r)] < 0.0 ? s + m : s;
        }
        std::vector<double> col(static_cast<std::size_t>(n_));
        std::vector<double> w;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n_; ++j) col[static_cast<std::size_t>(j)] = cm.values(j, i);
            w = lu.solve(col);
            for (int r = 0; r < n_; ++r) {
                const double v = sigma[static_cast<std::size_t>(r)] * w[static_cast<std::size_t>(r)];
                t_(r, i) = v;
                t_(r, i + m) = -v;
            }
        }
        for (int r = 0; r < n_; ++r)
            t_(r, width_ - 1) = std::abs(u[static_cast<std::size_t>(r)]);
        rebuild_costs(/*phase1=*/false);
        return true;
    }

    /// Runs the current phase to optimality; returns pivot count.
    int iterate() {
        const int dantzig_cap = 500 + 20 * nreal_;
        const int hard_cap = 2000 + 40 * (nreal_ + n_);
        int pivots = 0;
        while (true) {
            const bool bland = pivots >= dantzig_cap;
            const int enter = pick_entering(bland);
            if (enter < 0) return pivots;
            const int leave = pick_leaving(enter);
            if (leave < 0)
                throw numerical_error("simplex_solve: unbounded direction; constraint matrix "
                                      "is not a valid collocation system");
            pivot(leave, enter);
            if (++pivots > hard_cap)
                throw numerical_error("simplex_solve: cycling guard exceeded");
        }
    }

    [[nodiscard]] double objective(bool phase1) const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) {
            const bool artificial = basis_[static_cast<std::size_t>(i)] >= nreal_;
            if (artificial == phase1) s += t_(i, width_ - 1);
        }
        return s;
    }

    /// Pivots any artificial still basic (at zero) onto a real column.
    void expel_artificials() {
        for (int i = 0; i < n_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < nreal_) continue;
            int enter = -1;
            double best = opts_.pivot_tol;
            for (int j = 0; j < nreal_; ++j) {
                const double v = std::abs(t_(i, j));
                if (v > best) { best = v; enter = j; }
            }
            if (enter < 0)
                throw numerical_error("simplex_solve: rank-deficient constraint rows");
            pivot(i, enter);
        }
    }

    void rebuild_costs(bool phase1) {
        // reduced costs r_j = c_j - c_B^T (B^{-1} A_j); the tableau already
        // holds B^{-1} A.
        std::fill(z_.begin(), z_.end(), 0.0);
        for (int j = 0; j < width_; ++j) {
            double cb_t = 0.0;
            for (int i = 0; i < n_; ++i) {
                const int bi = basis_[static_cast<std::size_t>(i)];
                const double ci = phase1 ? (bi >= nreal_ ? 1.0 : 0.0) : 1.0;
                if (ci != 0.0) cb_t += ci * t_(i, j);
            }
            double cj = 0.0;
            if (j < width_ - 1) {
                const bool artificial = j >= nreal_;
                cj = phase1 ? (artificial ? 1.0 : 0.0) : 1.0;
            }
            z_[static_cast<std::size_t>(j)] = cj - cb_t;
        }
        phase1_ = phase1;
    }

    [[nodiscard]] const std::vector<int>& basis() const noexcept { return basis_; }
    [[nodiscard]] int real_columns() const noexcept { return nreal_; }

private:
    [[nodiscard]] int pick_entering(bool bland) const {
        // phase 2 never re-admits artificial columns
        const int jmax = phase1_ ? width_ - 1 : nreal_;
        int best = -1;
        double best_val = -opts_.reduced_cost_tol;
        for (int j = 0; j < jmax; ++j) {
            const double v = z_[static_cast<std::size_t>(j)];
            if (v < best_val) {
                best = j;
                if (bland) break;
                best_val = v;
            }
        }
        return best;
    }

    [[nodiscard]] int pick_leaving(int enter) const {
        int best_row = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double d = t_(i, enter);
            if (d <= opts_.pivot_tol) continue;
            const double ratio = t_(i, width_ - 1) / d;
            if (best_row < 0) {
                best_ratio = ratio;
                best_row = i;
                continue;
            }
            const double tie = 1e-10 * (1.0 + std::abs(best_ratio));
            if (ratio < best_ratio - tie) {
                best_ratio = ratio;
                best_row = i;
            } else if (ratio <= best_ratio + tie &&
                       basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(best_row)]) {
                best_row = i;  // Bland-safe tie-break keeps the iteration finite
            }
        }
        return best_row;
    }

    void pivot(int row, int col) {
        const double inv = 1.0 / t_(row, col);
        for (int j = 0; j < width_; ++j) t_(row, j) *= inv;
        t_(row, col) = 1.0;
        for (int i = 0; i < n_; ++i) {
            if (i == row) continue;
            const double f = t_(i, col);
            if (f == 0.0) continue;
            for (int j = 0; j < width_; ++j) t_(i, j) -= f * t_(row, j);
            t_(i, col) = 0.0;
        }
        const double fz = z_[static_cast<std::size_t>(col)];
        if (fz != 0.0) {
            for (int j = 0; j < width_; ++j) z_[static_cast<std::size_t>(j)] -= fz * t_(row, j);
            z_[static_cast<std::size_t>(col)] = 0.0;
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    int n_;
    int nreal_;
    int width_;
    SimplexOptions opts_;
    Matrix t_;
    std::vector<double> z_;
    std::vector<int> basis_;
    bool phase1_ = false;
};

}  // namespace

StandardFormLP to_standard_form(const CollocationMatrix& m, std::span<const double> b) {
    const int n = m.dimension();
    const int cols = m.sample_count();
    if (static_cast<int>(b.size()) != n)
        throw config_error("to_standard_form: moment vector has wrong length");
    StandardFormLP lp{Matrix(n, 2 * cols), {b.begin(), b.end()}};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < cols; ++j) {
            lp.constraints(i, j) = m.values(i, j);
            lp.constraints(i, j + cols) = -m.values(i, j);
        }
    return lp;
}

SparseSolution simplex_solve(const StandardFormLP& lp, const SimplexOptions& opts,
                             SimplexStats* stats, std::span<const int> warm_support) {
    const int n = lp.dimension();
    const int m = lp.sample_count();
    if (2 * m != lp.constraints.cols())
        throw config_error("simplex_solve: constraint matrix is not a [M | -M] block");
    if (m < n) throw config_error("simplex_solve: underdetermined column block");

    // Rebuild the collocation view of the LP; submatrix gathers need it.
    CollocationMatrix cm{Matrix(n, m), std::vector<double>(static_cast<std::size_t>(m), 0.0)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) cm.values(i, j) = lp.constraints(i, j);

    SimplexStats local{};
    Tableau tab(lp, opts);
    bool warm_ok = false;
    if (!warm_support.empty()) {
        if (static_cast<int>(warm_support.size()) != n)
            throw config_error("simplex_solve: warm support must have exactly n indices");
        warm_ok = tab.init_warm(lp, cm, warm_support);
    }
    if (warm_ok) {
        local.warm_start_used = true;
    } else {
        tab.init_cold(lp);
        local.phase1_pivots = tab.iterate();
        double bscale = 1.0;
        for (double v : lp.rhs) bscale = std::max(bscale, std::abs(v));
        if (tab.objective(/*phase1=*/true) > opts.feasibility_tol * bscale)
            throw numerical_error("simplex_solve: constraints infeasible; collocation matrix "
                                  "is rank-deficient");
        tab.expel_artificials();
        tab.rebuild_costs(/*phase1=*/false);
    }
    local.phase2_pivots = tab.iterate();

    std::vector<int> support;
    support.reserve(static_cast<std::size_t>(n));
    for (int b : tab.basis()) support.push_back(b % m);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (static_cast<int>(support.size()) < n) support = complete_support(cm, std::move(support));

    const Matrix ms = cm.submatrix(support);
    const LuFactorization lu(ms);
    if (lu.singular())
        throw numerical_error("simplex_solve: final basis matrix is singular");
    SparseSolution out;
    out.support = std::move(support);
    out.values = lu.solve(lp.rhs);

    double bscale = 1.0;
    for (double v : lp.rhs) bscale = std::max(bscale, std::abs(v));
    const std::vector<double> resid = multiply(ms, out.values);
    for (int i = 0; i < n; ++i)
        if (std::abs(resid[static_cast<std::size_t>(i)] - lp.rhs[static_cast<std::size_t>(i)]) >
            opts.feasibility_tol * bscale)
            throw numerical_error("simplex_solve: solution fails feasibility residual check");

    for (double v : out.values) out.objective += std::abs(v);
    if (stats) *stats = local;
    return out;
}

CertificateReport certificate_check(const CollocationMatrix& m, std::span<const int> support,
                                    std::span<const double> b, bool expect_nonvanishing,
                                    const SimplexOptions& opts) {
    const int n = m.dimension();
    if (static_cast<int>(support.size()) != n)
        throw config_error("certificate_check: support must have exactly n indices");
    std::vector<int> s(support.begin(), support.end());
    std::sort(s.begin(), s.end());
    if (std::unique(s.begin(), s.end()) != s.end())
        throw config_error("certificate_check: duplicate support indices");
    if (s.front() < 0 || s.back() >= m.sample_count())
        throw config_error("certificate_check: support index out of range");

    const LuFactorization lu(m.submatrix(s));
    if (lu.singular())
        throw numerical_error("certificate_check: singular support submatrix");
    const std::vector<double> u = lu.solve(b);

    bool vanished = false;
    std::vector<double> sigma(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double v = u[static_cast<std::size_t>(i)];
        if (std::abs(v) <= opts.nonzero_tol) vanished = true;
        else sigma[static_cast<std::size_t>(i)] = v > 0.0 ? 1.0 : -1.0;
    }
    const std::vector<double> dual = lu.solve_transpose(sigma);

    CertificateReport report;
    std::size_t next = 0;
    for (int j = 0; j < m.sample_count(); ++j) {
        if (next < s.size() && s[next] == j) { ++next; continue; }
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += m.values(i, j) * dual[static_cast<std::size_t>(i)];
        report.dual_norm = std::max(report.dual_norm, std::abs(dot));
    }
    report.margin = 1.0 - report.dual_norm;
    report.pass = report.dual_norm <= 1.0 + opts.certificate_tol &&
                  !(expect_nonvanishing && vanished);
    return report;
}

std::vector<int> complete_support(const CollocationMatrix& m, std::vector<int> support) {
    const int n = m.dimension();
    const int cols = m.sample_count();
    std::sort(support.begin(), support.end());
    if (std::unique(support.begin(), support.end()) != support.end())
        throw config_error("complete_support: duplicate indices");
    if (!support.empty() && (support.front() < 0 || support.back() >= cols))
        throw config_error("complete_support: index out of range");
    if (static_cast<int>(support.size()) > n)
        throw config_error("complete_support: more indices than basis dimension");

    // modified Gram-Schmidt over accepted columns
    std::vector<std::vector<double>> q;
    auto try_add = [&](int j) -> bool {
        std::vector<double> r(static_cast<std::size_t>(n));
        double norm0 = 0.0;
        for (int i = 0; i < n; ++i) {
            r[static_cast<std::size_t>(i)] = m.values(i, j);
            norm0 += r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
        }
        norm0 = std::sqrt(norm0);
        for (const auto& qi : q) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += qi[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
            for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] -= dot * qi[static_cast<std::size_t>(i)];
        }
        double norm = 0.0;
        for (double v : r) norm += v * v;
        norm = std::sqrt(norm);
        if (norm <= 1e-10 * std::max(norm0, 1.0)) return false;
        for (double& v : r) v /= norm;
        q.push_back(std::move(r));
        return true;
    };

    for (int j : support)
        if (!try_add(j))
            throw numerical_error("complete_support: given columns are linearly dependent");
    for (int j = 0; j < cols && static_cast<int>(support.size()) < n; ++j) {
        if (std::binary_search(support.begin(), support.end(), j)) continue;
        if (try_add(j)) support.insert(std::upper_bound(support.begin(), support.end(), j), j);
    }
    if (static_cast<int>(support.size()) < n)
        throw numerical_error("complete_support: collocation matrix is rank-deficient");
    return support;
}

}  // namespace chebrec
