#include "doctest.h"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chebrec/diagnostics.hpp"
#include "chebrec/recovery.hpp"
#include "test_support.hpp"

using namespace chebrec;
namespace ts = chebrec::testsupport;
namespace fs = std::filesystem;

namespace {

/// Accumulates a criterion verdict and prints one summary line when it goes
/// out of scope, so the run always shows a [PASS]/[FAIL] line per criterion.
class Criterion {
public:
    Criterion(int number, std::string name) : number_(number), name_(std::move(name)) {}
    ~Criterion() {
        std::printf("[%s] criterion %d: %s\n", ok_ ? "PASS" : "FAIL", number_, name_.c_str());
        std::fflush(stdout);
    }
    void check(bool condition) { ok_ = ok_ && condition; }
    [[nodiscard]] bool ok() const { return ok_; }

private:
    int number_;
    std::string name_;
    bool ok_ = true;
};

#define CRIT(crit, expr)                      \
    do {                                      \
        const bool crit_ok_ = bool(expr);     \
        (crit).check(crit_ok_);               \
        CHECK_MESSAGE(crit_ok_, #expr);       \
    } while (0)

const std::vector<SystemKind> kKinds = {SystemKind::polynomial, SystemKind::trigonometric,
                                        SystemKind::exponential};

/// Full weight vector (length m) at x, scattered from the sparse row.
std::vector<double> dense_row(const PiecewiseRecoveryMap& map, double x) {
    std::vector<double> row(static_cast<std::size_t>(map.sample_count()), 0.0);
    const AsharpRow ar = asharp_row(map, x);
    for (std::size_t t = 0; t < ar.indices.size(); ++t)
        row[static_cast<std::size_t>(ar.indices[t])] = ar.values[t];
    return row;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "missing file: " << path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("criterion 1") {
    Criterion crit(1, "exact recovery on the model space");
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    int functions_tested = 0;
    double worst = 0.0;

    for (const SystemKind kind : kKinds) {
        for (int n = 3; n <= 5; ++n) {
            for (int m = n; m <= 2 * n; ++m) {
                const ChebyshevSystem sys = make_system(kind, n);
                const SamplingGrid grid(ts::random_grid(rng, m));
                const PiecewiseRecoveryMap map = build_recovery_map(sys, grid);

                // precompute the weight rows once; both functions share them
                std::vector<std::vector<double>> rows;
                std::vector<double> xs;
                rows.reserve(2001);
                xs.reserve(2001);
                for (int t = 0; t <= 2000; ++t) {
                    xs.push_back(-1.0 + 2.0 * t / 2000.0);
                    rows.push_back(dense_row(map, xs.back()));
                }

                for (int rep = 0; rep < 3; ++rep) {
                    const ts::ModelFunction v(rng, n);
                    std::vector<double> y(static_cast<std::size_t>(m));
                    for (int i = 0; i < m; ++i)
                        y[static_cast<std::size_t>(i)] =
                            v(sys, grid.points()[static_cast<std::size_t>(i)]);
                    double vmax = 0.0;
                    for (double x : xs) vmax = std::max(vmax, std::abs(v(sys, x)));
                    double err = 0.0;
                    for (std::size_t t = 0; t < xs.size(); ++t) {
                        double delta = 0.0;
                        for (int i = 0; i < m; ++i)
                            delta += rows[t][static_cast<std::size_t>(i)] *
                                     y[static_cast<std::size_t>(i)];
                        err = std::max(err, std::abs(v(sys, xs[t]) - delta));
                    }
                    worst = std::max(worst, err / (1.0 + vmax));
                    CRIT(crit, err <= 1e-9 * (1.0 + vmax));
                    ++functions_tested;
                }
            }
        }
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
    CRIT(crit, functions_tested >= 100);
    CRIT(crit, elapsed.count() < 10.0);
    MESSAGE("recovered " << functions_tested << " functions, worst relative error " << worst
                         << ", " << elapsed.count() << " s");
}

TEST_CASE("criterion 2") {
    Criterion crit(2, "node interpolation and weight continuity");
    std::mt19937_64 rng(202);

    struct Config {
        SystemKind kind;
        int n;
        std::vector<double> points;
    };
    std::vector<Config> configs;
    configs.push_back({SystemKind::polynomial, 4, {-1.0, -0.5, 0.0, 0.25, 0.75, 1.0}});
    configs.push_back({SystemKind::trigonometric, 4, ts::random_grid(rng, 7)});
    configs.push_back({SystemKind::exponential, 3, ts::random_grid(rng, 5)});

    for (const Config& config : configs) {
        const ChebyshevSystem sys = make_system(config.kind, config.n);
        const SamplingGrid grid(config.points);
        const PiecewiseRecoveryMap map = build_recovery_map(sys, grid);
        const int m = map.sample_count();

        std::vector<double> y(static_cast<std::size_t>(m));
        for (auto& v : y) v = ts::normal01(rng);

        for (int l = 0; l < m; ++l) {
            const double node = grid.points()[static_cast<std::size_t>(l)];

            // recovered values reproduce the observations bit-exactly at nodes
            CRIT(crit, evaluate_delta(map, y, node) == y[static_cast<std::size_t>(l)]);

            // the weight functions approach the Kronecker row near each node
            for (double side : {-1e-7, 1e-7}) {
                const double x = node + side;
                if (x < -1.0 || x > 1.0) continue;
                const std::vector<double> row = dense_row(map, x);
                for (int i = 0; i < m; ++i) {
                    const double expected = i == l ? 1.0 : 0.0;
                    CRIT(crit, std::abs(row[static_cast<std::size_t>(i)] - expected) <= 1e-4);
                }
            }

            // algebraic continuity: every subinterval touching the node keeps
            // it in its support and interpolates it exactly
            const std::vector<double> b = moment_vector(sys, node);
            for (int k = 0; k < map.subinterval_count(); ++k) {
                const SubintervalRecord& rec = map.record(k);
                const bool touches = (rec.left_sample && *rec.left_sample == l) ||
                                     (rec.right_sample && *rec.right_sample == l);
                if (!touches) continue;
                const std::vector<double> u = rec.factor.solve(b);
                bool found = false;
                for (std::size_t t = 0; t < rec.support.size(); ++t) {
                    const double expected = rec.support[t] == l ? 1.0 : 0.0;
                    if (rec.support[t] == l) found = true;
                    CRIT(crit, std::abs(u[t] - expected) <= 1e-9);
                }
                CRIT(crit, found);
            }
        }
    }
}

TEST_CASE("criterion 3") {
    Criterion crit(3, "certificate soundness and completeness");
    std::mt19937_64 rng(303);
    SimplexOptions opts;
    opts.certificate_tol = 1e-8;

    long long supports_checked = 0;
    for (const SystemKind kind : kKinds) {
        for (int n = 3; n <= 4; ++n) {
            for (int m = n; m <= 8; ++m) {
                const ChebyshevSystem sys = make_system(kind, n);
                const SamplingGrid grid(ts::random_grid(rng, m));
                const CollocationMatrix cm = collocate(sys, grid);

                for (int probe = 0; probe < 50; ++probe) {
                    double x = ts::uniform(rng, -1.0, 1.0);
                    bool near_sample = false;
                    for (double p : grid.points())
                        near_sample = near_sample || std::abs(x - p) < 1e-6;
                    if (near_sample) continue;  // keep the probes generic
                    const std::vector<double> b = moment_vector(sys, x);

                    const std::vector<SupportCandidate> all = enumerate_supports(cm, b);
                    double best = 1e300;
                    for (const auto& cand : all)
                        if (cand.feasible) best = std::min(best, cand.objective);

                    for (const auto& cand : all) {
                        if (!cand.feasible) continue;
                        const bool attains = std::abs(cand.objective - best) <= 1e-8;
                        const bool certified =
                            certificate_check(cm, cand.support, b, false, opts).pass;
                        CRIT(crit, certified == attains);
                        ++supports_checked;
                    }
                }
            }
        }
    }
    CRIT(crit, supports_checked > 10000);
    MESSAGE("checked " << supports_checked << " supports");
}

TEST_CASE("criterion 4") {
    Criterion crit(4, "pointwise optimality against independent solves");
    std::mt19937_64 rng(404);

    struct Config {
        SystemKind kind;
        int n, m;
    };
    for (const Config& config :
         {Config{SystemKind::polynomial, 3, 5}, Config{SystemKind::trigonometric, 4, 6},
          Config{SystemKind::exponential, 3, 4}}) {
        const ChebyshevSystem sys = make_system(config.kind, config.n);
        const SamplingGrid grid(ts::random_grid(rng, config.m));
        const PiecewiseRecoveryMap map = build_recovery_map(sys, grid);

        for (int k = 0; k < map.subinterval_count(); ++k) {
            const SubintervalRecord& rec = map.record(k);
            std::vector<double> probes;
            probes.reserve(100);
            for (int t = 0; t < 100; ++t) {
                const double span = rec.right - rec.left;
                probes.push_back(rec.left + span * (0.001 + 0.998 * ts::uniform01(rng)));
            }
            const std::vector<SparseSolution> independent = ersatz_solver(sys, grid, probes);
            for (std::size_t t = 0; t < probes.size(); ++t)
                CRIT(crit,
                     std::abs(l1_profile(map, probes[t]) - independent[t].objective) <= 1e-8);
        }
    }
}

TEST_CASE("criterion 5") {
    Criterion crit(5, "golden norm-ratio values");
    const ChebyshevSystem sys = make_system(SystemKind::polynomial, 3);

    const PiecewiseRecoveryMap three = build_recovery_map(sys, SamplingGrid({-1.0, 0.0, 1.0}));
    const RatioReport report = rho_norm_ratio(three);
    CRIT(crit, std::abs(report.rho - 1.25) <= 1e-8);
    CRIT(crit, std::abs(report.mu - 2.25) <= 1e-8);
    CRIT(crit, std::abs(std::abs(report.argmax_x) - 0.5) <= 1e-6);

    const PiecewiseRecoveryMap four =
        build_recovery_map(sys, SamplingGrid({-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0}));
    CRIT(crit, std::abs(l1_profile(four, 0.0) - 1.25) <= 1e-8);
}

TEST_CASE("criterion 6") {
    Criterion crit(6, "worst-case error bound audits");
    const ChebyshevSystem sys = make_system(SystemKind::polynomial, 4);
    const SamplingGrid grid({-1.0, -0.6, -0.1, 0.3, 0.8, 1.0});
    const PiecewiseRecoveryMap map = build_recovery_map(sys, grid);

    int total_trials = 0;
    int eps_index = 0;
    for (const double eps : {0.0, 1e-3, 1e-1}) {
        const WceAudit audit = wce_audit(map, eps, 334, 501, 600 + eps_index++);
        CRIT(crit, audit.observed <= audit.mu * eps + 1e-8);
        CRIT(crit, audit.pass);
        if (eps == 0.0) CRIT(crit, audit.observed <= 1e-9);
        total_trials += audit.trials;
    }
    CRIT(crit, total_trials >= 1000);
}

TEST_CASE("criterion 7") {
    Criterion crit(7, "warm insertion equals cold rebuild");
    std::mt19937_64 rng(707);

    struct Config {
        SystemKind kind;
        int n, m;
    };
    int insertions = 0;
    for (const Config& config :
         {Config{SystemKind::polynomial, 3, 4}, Config{SystemKind::trigonometric, 4, 5},
          Config{SystemKind::exponential, 3, 5}, Config{SystemKind::polynomial, 5, 7},
          Config{SystemKind::trigonometric, 5, 6}}) {
        const ChebyshevSystem sys = make_system(config.kind, config.n);
        PiecewiseRecoveryMap current =
            build_recovery_map(sys, SamplingGrid(ts::random_grid(rng, config.m)));

        for (int step = 0; step < 10; ++step) {
            double x_new = 0.0;
            for (;;) {
                x_new = ts::uniform(rng, -0.999, 0.999);
                bool apart = true;
                for (double p : current.grid().points())
                    apart = apart && std::abs(x_new - p) > 1e-3;
                if (apart) break;
            }
            PiecewiseRecoveryMap warm = insert_point_warm(current, x_new, InsertStrategy::warm);
            const PiecewiseRecoveryMap cold =
                build_recovery_map(make_system(config.kind, config.n),
                                   SamplingGrid(warm.grid().points()));

            double worst = 0.0;
            for (int t = 0; t <= 1000; ++t) {
                const double x = -1.0 + 2.0 * t / 1000.0;
                const std::vector<double> wr = dense_row(warm, x);
                const std::vector<double> cr = dense_row(cold, x);
                for (std::size_t i = 0; i < wr.size(); ++i)
                    worst = std::max(worst, std::abs(wr[i] - cr[i]));
            }
            CRIT(crit, worst <= 1e-9);
            ++insertions;
            current = std::move(warm);
        }
    }
    CRIT(crit, insertions == 50);
}

TEST_CASE("criterion 8") {
    Criterion crit(8, "sum-to-one and unit norm floor");
    std::mt19937_64 rng(808);

    std::vector<PiecewiseRecoveryMap> maps;
    maps.push_back(build_recovery_map(make_system(SystemKind::polynomial, 3),
                                      SamplingGrid({-1.0, 0.0, 1.0})));
    maps.push_back(build_recovery_map(make_system(SystemKind::polynomial, 3),
                                      SamplingGrid({-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0})));
    maps.push_back(build_recovery_map(make_system(SystemKind::trigonometric, 4),
                                      SamplingGrid(ts::random_grid(rng, 7))));
    maps.push_back(build_recovery_map(make_system(SystemKind::exponential, 4),
                                      SamplingGrid(ts::random_grid(rng, 6))));

    for (const PiecewiseRecoveryMap& map : maps) {
        for (int t = 0; t <= 2000; ++t) {
            const double x = -1.0 + 2.0 * t / 2000.0;
            const std::vector<double> row = dense_row(map, x);
            double sum = 0.0;
            double l1 = 0.0;
            for (double w : row) {
                sum += w;
                l1 += std::abs(w);
            }
            CRIT(crit, std::abs(sum - 1.0) <= 1e-10);
            CRIT(crit, l1 >= 1.0 - 1e-10);
        }
    }
}

TEST_CASE("criterion 9") {
    Criterion crit(9, "byte-identical reruns");
    const fs::path dir = fs::temp_directory_path() / "chebrec_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);

    {
        std::ofstream cfg(dir / "cfg.json", std::ios::binary);
        cfg << R"({"basis":{"kind":"exponential","n":4,"params":[0.5,1.25,2.0]},)"
            << R"("points":{"generator":"random","count":8},"seed":31,)"
            << R"("probes":{"count":101},"observations":{"function":"runge"},)"
            << R"("outputs":["map","asharp-samples","delta-samples","ratio","wce-audit"],)"
            << R"("audit":{"epsilons":[0.0,0.02],"trials":25,"density":201}})";
    }

    auto run = [&](const std::string& ws) {
        const std::string cmd = std::string("\"") + CHEBREC_CLI_PATH + "\" --config \"" +
                                (dir / "cfg.json").string() + "\" --out \"" +
                                (dir / ws).string() + "\" build >\"" +
                                (dir / (ws + ".out")).string() + "\" 2>\"" +
                                (dir / (ws + ".err")).string() + "\"";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    CRIT(crit, run("ws1") == 0);
    CRIT(crit, run("ws2") == 0);
    for (const char* f : {"map.ormap", "asharp_samples.csv", "delta_samples.csv", "ratio.txt",
                          "wce_audit.txt", "report.txt"}) {
        CAPTURE(f);
        CRIT(crit, slurp(dir / "ws1" / f) == slurp(dir / "ws2" / f));
    }
}
