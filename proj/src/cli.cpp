#include "chebrec/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"

#include "chebrec/errors.hpp"
#include "chebrec/serialize.hpp"
#include "chebrec/text_format.hpp"
#include "deterministic_rng.hpp"

namespace chebrec {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;
const std::vector<std::string> kArtifactNames = {"map", "asharp-samples", "delta-samples",
                                                 "ratio", "wce-audit"};

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    for (const auto& item : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return item.key() == k;
            }) == allowed.end())
            throw config_error("config: unknown key '" + item.key() + "' in " + where);
    }
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw config_error("config: " + where + " must be a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw config_error("config: " + where + " must be an integer");
    return v.get<int>();
}

std::vector<double> as_number_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw config_error("config: " + where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(as_number(e, where + " entry"));
    return out;
}

std::vector<double> generate_points(const std::string& generator, int count,
                                    unsigned long long seed) {
    if (count < 2) throw config_error("config: points.count must be at least 2");
    std::vector<double> pts(static_cast<std::size_t>(count));
    if (generator == "equispaced") {
        for (int i = 0; i < count; ++i)
            pts[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / (count - 1);
    } else if (generator == "chebyshev-nodes") {
        for (int i = 0; i < count; ++i)
            pts[static_cast<std::size_t>(i)] = -std::cos((2.0 * i + 1.0) * kPi / (2.0 * count));
    } else if (generator == "random") {
        std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ull);
        for (int attempt = 0;; ++attempt) {
            for (auto& x : pts) x = -1.0 + 2.0 * detail::uniform01(rng);
            std::sort(pts.begin(), pts.end());
            if (std::adjacent_find(pts.begin(), pts.end()) == pts.end()) break;
            if (attempt > 100)
                throw config_error("config: random point generator failed to produce "
                                   "distinct points");
        }
    } else {
        throw config_error("config: unknown points.generator '" + generator + "'");
    }
    return pts;
}

double named_function(const std::string& name, double x) {
    if (name == "abs") return std::abs(x);
    if (name == "runge") return 1.0 / (1.0 + 25.0 * x * x);
    if (name == "sin") return std::sin(kPi * x);
    throw config_error("config: unknown observations.function '" + name + "'");
}

}  // namespace

RunConfig parse_config(const std::string& json_text,
                       std::optional<unsigned long long> seed_override,
                       std::optional<int> threads_override) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config: top level must be an object");
    require_keys(j, {"basis", "points", "probes", "observations", "outputs", "tolerances",
                     "audit", "seed", "threads"},
                 "top level");

    RunConfig cfg;

    if (j.contains("seed")) {
        const json& s = j["seed"];
        if (!s.is_number_integer() || s.get<long long>() < 0)
            throw config_error("config: seed must be a nonnegative integer");
        cfg.seed = s.get<unsigned long long>();
    }
    if (seed_override) cfg.seed = *seed_override;
    if (j.contains("threads")) cfg.threads = as_int(j["threads"], "threads");
    if (threads_override) cfg.threads = *threads_override;
    if (cfg.threads < 1) throw config_error("config: threads must be positive");

    if (!j.contains("basis")) throw config_error("config: missing 'basis'");
    const json& jb = j["basis"];
    if (!jb.is_object()) throw config_error("config: basis must be an object");
    require_keys(jb, {"kind", "n", "params"}, "basis");
    if (!jb.contains("kind") || !jb["kind"].is_string())
        throw config_error("config: basis.kind must be a string");
    cfg.kind = system_kind_from_string(jb["kind"].get<std::string>());
    if (cfg.kind == SystemKind::custom)
        throw config_error("config: custom bases are library-only; configs name a built-in kind");
    if (!jb.contains("n")) throw config_error("config: missing basis.n");
    cfg.n = as_int(jb["n"], "basis.n");
    if (cfg.n < 3) throw config_error("config: basis.n must be at least 3");
    if (jb.contains("params")) cfg.params = as_number_array(jb["params"], "basis.params");

    if (!j.contains("points")) throw config_error("config: missing 'points'");
    const json& jp = j["points"];
    if (!jp.is_object()) throw config_error("config: points must be an object");
    require_keys(jp, {"values", "generator", "count"}, "points");
    if (jp.contains("values")) {
        if (jp.contains("generator") || jp.contains("count"))
            throw config_error("config: points.values excludes generator/count");
        cfg.points = as_number_array(jp["values"], "points.values");
    } else {
        if (!jp.contains("generator") || !jp["generator"].is_string())
            throw config_error("config: points.generator must be a string");
        if (!jp.contains("count")) throw config_error("config: missing points.count");
        cfg.points = generate_points(jp["generator"].get<std::string>(),
                                     as_int(jp["count"], "points.count"), cfg.seed);
    }
    if (static_cast<int>(cfg.points.size()) < cfg.n)
        throw config_error("config: need at least n sample points");

    if (j.contains("probes")) {
        const json& jq = j["probes"];
        if (!jq.is_object()) throw config_error("config: probes must be an object");
        require_keys(jq, {"values", "count"}, "probes");
        if (jq.contains("values")) {
            if (jq.contains("count"))
                throw config_error("config: probes.values excludes probes.count");
            cfg.probes = as_number_array(jq["values"], "probes.values");
            std::sort(cfg.probes.begin(), cfg.probes.end());
        } else {
            if (!jq.contains("count")) throw config_error("config: probes needs values or count");
            const int count = as_int(jq["count"], "probes.count");
            if (count < 2) throw config_error("config: probes.count must be at least 2");
            cfg.probes.resize(static_cast<std::size_t>(count));
            for (int i = 0; i < count; ++i)
                cfg.probes[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / (count - 1);
        }
    } else {
        cfg.probes.resize(201);
        for (int i = 0; i < 201; ++i) cfg.probes[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / 200.0;
    }
    for (double x : cfg.probes)
        if (!(x >= -1.0 && x <= 1.0)) throw config_error("config: probe outside [-1,1]");

    if (j.contains("observations")) {
        const json& jo = j["observations"];
        if (!jo.is_object()) throw config_error("config: observations must be an object");
        require_keys(jo, {"values", "v_coeffs", "function"}, "observations");
        const int given = int(jo.contains("values")) + int(jo.contains("v_coeffs")) +
                          int(jo.contains("function"));
        if (given != 1)
            throw config_error("config: observations needs exactly one of values, v_coeffs, "
                               "function");
        if (jo.contains("values")) {
            cfg.obs_mode = ObservationsMode::values;
            cfg.obs_data = as_number_array(jo["values"], "observations.values");
            if (cfg.obs_data.size() != cfg.points.size())
                throw config_error("config: observations.values must have one entry per point");
        } else if (jo.contains("v_coeffs")) {
            cfg.obs_mode = ObservationsMode::coefficients;
            cfg.obs_data = as_number_array(jo["v_coeffs"], "observations.v_coeffs");
            if (static_cast<int>(cfg.obs_data.size()) != cfg.n)
                throw config_error("config: observations.v_coeffs must have n entries");
        } else {
            cfg.obs_mode = ObservationsMode::function;
            if (!jo["function"].is_string())
                throw config_error("config: observations.function must be a string");
            cfg.obs_function = jo["function"].get<std::string>();
            (void)named_function(cfg.obs_function, 0.0);  // validate the name
        }
    }

    if (j.contains("outputs")) {
        const json& jo = j["outputs"];
        if (!jo.is_array()) throw config_error("config: outputs must be an array");
        std::vector<std::string> requested;
        for (const auto& e : jo) {
            if (!e.is_string()) throw config_error("config: outputs entries must be strings");
            const std::string name = e.get<std::string>();
            if (std::find(kArtifactNames.begin(), kArtifactNames.end(), name) ==
                kArtifactNames.end())
                throw config_error("config: unknown output '" + name + "'");
            requested.push_back(name);
        }
        for (const auto& name : kArtifactNames)
            if (std::find(requested.begin(), requested.end(), name) != requested.end())
                cfg.outputs.push_back(name);
    } else {
        cfg.outputs = {"map"};
    }

    if (j.contains("tolerances")) {
        const json& jt = j["tolerances"];
        if (!jt.is_object()) throw config_error("config: tolerances must be an object");
        require_keys(jt,
                     {"feasibility", "certificate", "nonzero", "reduced_cost", "pivot",
                      "maximize_density", "maximize_x_tol"},
                     "tolerances");
        auto positive = [&](const char* key, double fallback) {
            if (!jt.contains(key)) return fallback;
            const double v = as_number(jt[key], std::string("tolerances.") + key);
            if (!(v > 0.0))
                throw config_error(std::string("config: tolerances.") + key + " must be positive");
            return v;
        };
        cfg.tolerances.feasibility_tol = positive("feasibility", cfg.tolerances.feasibility_tol);
        cfg.tolerances.certificate_tol = positive("certificate", cfg.tolerances.certificate_tol);
        cfg.tolerances.nonzero_tol = positive("nonzero", cfg.tolerances.nonzero_tol);
        cfg.tolerances.reduced_cost_tol = positive("reduced_cost", cfg.tolerances.reduced_cost_tol);
        cfg.tolerances.pivot_tol = positive("pivot", cfg.tolerances.pivot_tol);
        if (jt.contains("maximize_density")) {
            cfg.maximize.density = as_int(jt["maximize_density"], "tolerances.maximize_density");
            if (cfg.maximize.density < 3)
                throw config_error("config: tolerances.maximize_density must be at least 3");
        }
        if (jt.contains("maximize_x_tol"))
            cfg.maximize.x_tol = positive("maximize_x_tol", cfg.maximize.x_tol);
    }

    if (j.contains("audit")) {
        const json& ja = j["audit"];
        if (!ja.is_object()) throw config_error("config: audit must be an object");
        require_keys(ja, {"epsilons", "trials", "density"}, "audit");
        if (ja.contains("epsilons")) {
            cfg.audit_epsilons = as_number_array(ja["epsilons"], "audit.epsilons");
            if (cfg.audit_epsilons.empty())
                throw config_error("config: audit.epsilons must not be empty");
            for (double e : cfg.audit_epsilons)
                if (!(e >= 0.0)) throw config_error("config: audit epsilons must be nonnegative");
        }
        if (ja.contains("trials")) {
            cfg.audit_trials = as_int(ja["trials"], "audit.trials");
            if (cfg.audit_trials < 1) throw config_error("config: audit.trials must be positive");
        }
        if (ja.contains("density")) {
            cfg.audit_density = as_int(ja["density"], "audit.density");
            if (cfg.audit_density < 2)
                throw config_error("config: audit.density must be at least 2");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path, std::optional<unsigned long long> seed_override,
                      std::optional<int> threads_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), seed_override, threads_override);
}

std::string RunConfig::canonical() const {
    std::ostringstream out;
    out << "basis " << to_string(kind) << '\n';
    out << "n " << n << '\n';
    out << "params " << params.size();
    for (double p : params) out << ' ' << fmt17(p);
    out << '\n';
    out << "points " << points.size();
    for (double x : points) out << ' ' << fmt17(x);
    out << '\n';
    out << "probes " << probes.size();
    for (double x : probes) out << ' ' << fmt17(x);
    out << '\n';
    out << "observations ";
    switch (obs_mode) {
        case ObservationsMode::none: out << "none"; break;
        case ObservationsMode::values: out << "values"; break;
        case ObservationsMode::coefficients: out << "v_coeffs"; break;
        case ObservationsMode::function: out << "function " << obs_function; break;
    }
    for (double v : obs_data) out << ' ' << fmt17(v);
    out << '\n';
    out << "outputs";
    for (const auto& o : outputs) out << ' ' << o;
    out << '\n';
    out << "tolerances " << fmt17(tolerances.feasibility_tol) << ' '
        << fmt17(tolerances.certificate_tol) << ' ' << fmt17(tolerances.nonzero_tol) << ' '
        << fmt17(tolerances.reduced_cost_tol) << ' ' << fmt17(tolerances.pivot_tol) << '\n';
    out << "maximize " << maximize.density << ' ' << fmt17(maximize.x_tol) << '\n';
    out << "audit_epsilons " << audit_epsilons.size();
    for (double e : audit_epsilons) out << ' ' << fmt17(e);
    out << '\n';
    out << "audit_trials " << audit_trials << '\n';
    out << "audit_density " << audit_density << '\n';
    out << "seed " << seed << '\n';
    return out.str();
}

void emit_samples(const PiecewiseRecoveryMap& map, const std::vector<double>* y,
                  std::span<const double> probes, std::ostream& out) {
    const int m = map.sample_count();
    if (y && static_cast<int>(y->size()) != m)
        throw config_error("emit_samples: observation vector has wrong length");
    std::vector<double> xs(probes.begin(), probes.end());
    std::sort(xs.begin(), xs.end());
    for (double x : xs)
        if (!(x >= -1.0 && x <= 1.0)) throw config_error("emit_samples: probe outside [-1,1]");

    out << "x";
    for (int i = 1; i <= m; ++i) out << ",asharp_" << i;
    if (y) out << ",delta";
    out << '\n';

    std::vector<double> row(static_cast<std::size_t>(m));
    for (double x : xs) {
        std::fill(row.begin(), row.end(), 0.0);
        const AsharpRow ar = asharp_row(map, x);
        for (std::size_t t = 0; t < ar.indices.size(); ++t)
            row[static_cast<std::size_t>(ar.indices[t])] = ar.values[t];
        out << fmt17(x);
        for (int i = 0; i < m; ++i) out << ',' << fmt17(row[static_cast<std::size_t>(i)]);
        if (y) {
            double d = 0.0;
            for (int i = 0; i < m; ++i) d += row[static_cast<std::size_t>(i)] * (*y)[static_cast<std::size_t>(i)];
            out << ',' << fmt17(d);
        }
        out << '\n';
    }
    if (!out) throw io_error("emit_samples: stream write failed");
}

namespace {

class PhaseClock {
public:
    explicit PhaseClock(std::vector<PhaseTiming>& sink) : sink_(sink) {}

    template <typename F>
    auto time(const std::string& phase, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            record(phase, t0);
        } else {
            auto result = f();
            record(phase, t0);
            return result;
        }
    }

private:
    void record(const std::string& phase, std::chrono::steady_clock::time_point t0) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        sink_.push_back({phase, dt.count()});
    }

    std::vector<PhaseTiming>& sink_;
};

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
    if (out_dir.empty()) throw config_error("execute: output directory not set");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw io_error("execute: cannot create output directory '" + out_dir + "'");
    return out_dir;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("execute: cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw io_error("execute: write to '" + path.string() + "' failed");
}

std::string render_ratio(const RatioReport& ratio) {
    std::ostringstream out;
    out << "chebrec-ratio 1\n";
    out << "rho " << fmt17(ratio.rho) << '\n';
    out << "mu " << fmt17(ratio.mu) << '\n';
    out << "argmax sub " << (ratio.argmax_subinterval + 1) << " x " << fmt17(ratio.argmax_x)
        << '\n';
    out << "subintervals " << ratio.per_subinterval.size() << '\n';
    for (const auto& s : ratio.per_subinterval)
        out << "sub " << (s.subinterval + 1) << " x " << fmt17(s.x) << " max " << fmt17(s.value)
            << '\n';
    return out.str();
}

std::string render_audits(const std::vector<WceAudit>& audits) {
    std::ostringstream out;
    out << "chebrec-audit 1\n";
    out << "audits " << audits.size() << '\n';
    for (const auto& a : audits)
        out << "audit epsilon " << fmt17(a.epsilon) << " mu " << fmt17(a.mu) << " bound "
            << fmt17(a.bound) << " observed " << fmt17(a.observed) << " pass " << (a.pass ? 1 : 0)
            << " trials " << a.trials << " density " << a.grid_density << '\n';
    return out.str();
}

std::vector<double> resolve_observations(const RunConfig& cfg, const PiecewiseRecoveryMap& map) {
    const int m = map.sample_count();
    std::vector<double> y(static_cast<std::size_t>(m));
    switch (cfg.obs_mode) {
        case ObservationsMode::none:
            throw config_error("execute: this command needs observations in the config");
        case ObservationsMode::values:
            if (static_cast<int>(cfg.obs_data.size()) != m)
                throw config_error("execute: observations.values length does not match the "
                                   "map's grid");
            return cfg.obs_data;
        case ObservationsMode::coefficients: {
            if (static_cast<int>(cfg.obs_data.size()) != map.dimension())
                throw config_error("execute: observations.v_coeffs length does not match the "
                                   "map's basis");
            std::vector<double> col(static_cast<std::size_t>(map.dimension()));
            for (int i = 0; i < m; ++i) {
                map.system().moment_into(map.grid().points()[static_cast<std::size_t>(i)], col);
                double v = 0.0;
                for (int jj = 0; jj < map.dimension(); ++jj)
                    v += cfg.obs_data[static_cast<std::size_t>(jj)] * col[static_cast<std::size_t>(jj)];
                y[static_cast<std::size_t>(i)] = v;
            }
            return y;
        }
        case ObservationsMode::function:
            for (int i = 0; i < m; ++i)
                y[static_cast<std::size_t>(i)] =
                    named_function(cfg.obs_function, map.grid().points()[static_cast<std::size_t>(i)]);
            return y;
    }
    throw config_error("execute: unknown observations mode");
}

void fill_report_from_map(RunReport& report, const PiecewiseRecoveryMap& map) {
    report.kind = map.system().kind();
    report.n = map.dimension();
    report.params = map.system().parameters();
    report.m = map.sample_count();
    report.subintervals.clear();
    for (int k = 0; k < map.subinterval_count(); ++k) {
        const SubintervalRecord& rec = map.record(k);
        report.subintervals.push_back(
            {k, rec.left, rec.right, rec.support, rec.pivots, rec.warm_started});
    }
}

}  // namespace

std::string RunReport::render() const {
    std::ostringstream out;
    out << "chebrec-report 1\n";
    out << "tool " << tool << '\n';
    out << "config " << config_digest << '\n';
    out << "basis " << to_string(kind) << " n " << n << " params " << params.size();
    for (double p : params) out << ' ' << fmt17(p);
    out << '\n';
    out << "grid m " << m << '\n';
    out << "subintervals " << subintervals.size() << '\n';
    for (const auto& s : subintervals) {
        out << "sub " << (s.index + 1) << " range " << fmt17(s.left) << ' ' << fmt17(s.right)
            << " support";
        for (int idx : s.support) out << ' ' << (idx + 1);
        out << " pivots " << s.pivots << " start " << (s.warm ? "warm" : "cold") << '\n';
    }
    if (!map_file.empty()) out << "map " << map_file << '\n';
    if (ratio) {
        out << "rho " << fmt17(ratio->rho) << '\n';
        out << "mu " << fmt17(ratio->mu) << '\n';
        out << "argmax sub " << (ratio->argmax_subinterval + 1) << " x "
            << fmt17(ratio->argmax_x) << '\n';
    }
    for (const auto& a : audits)
        out << "audit epsilon " << fmt17(a.epsilon) << " mu " << fmt17(a.mu) << " bound "
            << fmt17(a.bound) << " observed " << fmt17(a.observed) << " pass " << (a.pass ? 1 : 0)
            << " trials " << a.trials << " density " << a.grid_density << '\n';
    out << "artifacts " << artifacts.size();
    for (const auto& f : artifacts) out << ' ' << f;
    out << '\n';
    return out.str();
}

RunReport execute(const CommandRequest& request) {
    const std::filesystem::path out_dir = prepare_out_dir(request.out_dir);
    const std::filesystem::path map_path = out_dir / "map.ormap";
    const RunConfig& cfg = request.config;

    if (request.cmd != Subcommand::insert && !request.have_config)
        throw config_error("execute: this subcommand requires --config");

    RunReport report;
    report.config_digest = request.have_config ? fnv1a_hex(cfg.canonical()) : "none";
    PhaseClock clock(report.timings);

    BuildOptions build_opts;
    build_opts.simplex = cfg.tolerances;
    build_opts.threads = cfg.threads;

    auto build_fresh = [&] {
        const ChebyshevSystem system = make_system(cfg.kind, cfg.n, cfg.params);
        const SamplingGrid grid(cfg.points);
        return build_recovery_map(system, grid, build_opts);
    };
    auto save_to_workspace = [&](const PiecewiseRecoveryMap& m) {
        clock.time("save", [&] { save_map(m, map_path.string()); });
        report.map_file = "map.ormap";
        report.artifacts.push_back("map.ormap");
    };
    auto ensure_map = [&]() -> PiecewiseRecoveryMap {
        if (std::filesystem::exists(map_path))
            return clock.time("load", [&] { return load_map(map_path.string()); });
        auto m = clock.time("build", build_fresh);
        save_to_workspace(m);
        return m;
    };
    auto emit_to_file = [&](const PiecewiseRecoveryMap& m, const std::vector<double>* y,
                            const char* filename) {
        clock.time("emit", [&] {
            std::ostringstream buf;
            emit_samples(m, y, cfg.probes, buf);
            write_text_file(out_dir / filename, buf.str());
        });
        report.artifacts.push_back(filename);
    };
    auto run_ratio = [&](const PiecewiseRecoveryMap& m) {
        report.ratio = clock.time("ratio", [&] { return rho_norm_ratio(m, cfg.maximize); });
        write_text_file(out_dir / "ratio.txt", render_ratio(*report.ratio));
        report.artifacts.push_back("ratio.txt");
    };
    auto run_audits = [&](const PiecewiseRecoveryMap& m) {
        clock.time("audit", [&] {
            for (double eps : cfg.audit_epsilons)
                report.audits.push_back(wce_audit(m, eps, cfg.audit_trials, cfg.audit_density,
                                                  cfg.seed, cfg.maximize));
        });
        write_text_file(out_dir / "wce_audit.txt", render_audits(report.audits));
        report.artifacts.push_back("wce_audit.txt");
    };
    auto requested = [&](const char* name) {
        return std::find(cfg.outputs.begin(), cfg.outputs.end(), name) != cfg.outputs.end();
    };

    switch (request.cmd) {
        case Subcommand::build: {
            const PiecewiseRecoveryMap map = clock.time("build", build_fresh);
            save_to_workspace(map);
            if (requested("asharp-samples")) emit_to_file(map, nullptr, "asharp_samples.csv");
            if (requested("delta-samples")) {
                const std::vector<double> y = resolve_observations(cfg, map);
                emit_to_file(map, &y, "delta_samples.csv");
            }
            if (requested("ratio")) run_ratio(map);
            if (requested("wce-audit")) run_audits(map);
            fill_report_from_map(report, map);
            report.artifacts.push_back("report.txt");
            write_text_file(out_dir / "report.txt", report.render());
            break;
        }
        case Subcommand::eval: {
            const PiecewiseRecoveryMap map = ensure_map();
            fill_report_from_map(report, map);
            emit_to_file(map, nullptr, "asharp_samples.csv");
            if (cfg.obs_mode != ObservationsMode::none) {
                const std::vector<double> y = resolve_observations(cfg, map);
                emit_to_file(map, &y, "delta_samples.csv");
            }
            break;
        }
        case Subcommand::ratio: {
            const PiecewiseRecoveryMap map = ensure_map();
            fill_report_from_map(report, map);
            run_ratio(map);
            break;
        }
        case Subcommand::audit: {
            const PiecewiseRecoveryMap map = ensure_map();
            fill_report_from_map(report, map);
            run_audits(map);
            break;
        }
        case Subcommand::insert: {
            if (!std::filesystem::exists(map_path))
                throw io_error("insert: no serialized map at '" + map_path.string() +
                               "'; run build first");
            const PiecewiseRecoveryMap map =
                clock.time("load", [&] { return load_map(map_path.string()); });
            const PiecewiseRecoveryMap grown = clock.time("insert", [&] {
                return insert_point_warm(map, request.insert_point, request.strategy, build_opts);
            });
            save_to_workspace(grown);
            fill_report_from_map(report, grown);
            report.artifacts.push_back("report.txt");
            write_text_file(out_dir / "report.txt", report.render());
            break;
        }
    }
    return report;
}

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"linear optimal recovery of functions from point samples"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    long long seed_flag = -1;
    int threads_flag = 0;
    double insert_point = 0.0;
    std::string strategy = "warm";

    app.add_option("--config", config_path, "path to a JSON run configuration");
    app.add_option("--out", out_dir, "workspace directory for artifacts")->capture_default_str();
    app.add_option("--seed", seed_flag, "override the config seed");
    app.add_option("--threads", threads_flag, "override the config thread count");

    CLI::App* cmd_build = app.add_subcommand("build", "solve and certify the recovery map");
    CLI::App* cmd_eval = app.add_subcommand("eval", "emit weight/recovery samples");
    CLI::App* cmd_ratio = app.add_subcommand("ratio", "compute the worst-case norm ratio");
    CLI::App* cmd_audit = app.add_subcommand("audit", "stress the worst-case error bound");
    CLI::App* cmd_insert = app.add_subcommand("insert", "add a sample point to a saved map");
    for (CLI::App* sub : {cmd_build, cmd_eval, cmd_ratio, cmd_audit, cmd_insert})
        sub->fallthrough();
    cmd_insert->add_option("--point", insert_point, "new sample point in (-1,1)")->required();
    cmd_insert->add_option("--strategy", strategy, "warm or cold resolve")
        ->check(CLI::IsMember({"warm", "cold"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        json record;
        record["error"] = {{"exit", 2}, {"kind", "config"}, {"message", e.what()}};
        std::fprintf(stderr, "%s\n", record.dump().c_str());
        return 2;
    }

    try {
        CommandRequest request;
        request.out_dir = out_dir;
        if (cmd_build->parsed()) request.cmd = Subcommand::build;
        else if (cmd_eval->parsed()) request.cmd = Subcommand::eval;
        else if (cmd_ratio->parsed()) request.cmd = Subcommand::ratio;
        else if (cmd_audit->parsed()) request.cmd = Subcommand::audit;
        else request.cmd = Subcommand::insert;
        if (request.cmd == Subcommand::insert) {
            request.insert_point = insert_point;
            request.strategy = strategy == "cold" ? InsertStrategy::cold : InsertStrategy::warm;
        }

        std::optional<unsigned long long> seed_override;
        if (app.count("--seed")) {
            if (seed_flag < 0) throw config_error("cli: --seed must be nonnegative");
            seed_override = static_cast<unsigned long long>(seed_flag);
        }
        std::optional<int> threads_override;
        if (app.count("--threads")) threads_override = threads_flag;

        if (!config_path.empty()) {
            request.config = load_config(config_path, seed_override, threads_override);
            request.have_config = true;
        } else if (seed_override || threads_override) {
            throw config_error("cli: --seed/--threads need a --config to override");
        }

        const RunReport report = execute(request);
        for (const auto& t : report.timings)
            std::printf("phase %s: %.4f s\n", t.phase.c_str(), t.seconds);
        for (const auto& f : report.artifacts)
            std::printf("wrote %s\n", (std::filesystem::path(out_dir) / f).string().c_str());
        return 0;
    } catch (const config_error& e) {
        json record;
        record["error"] = {{"exit", 2}, {"kind", "config"}, {"message", e.what()}};
        std::fprintf(stderr, "%s\n", record.dump().c_str());
        return 2;
    } catch (const numerical_error& e) {
        json record;
        record["error"] = {{"exit", 3}, {"kind", "numerical"}, {"message", e.what()}};
        if (e.subinterval() >= 0) record["error"]["subinterval"] = e.subinterval() + 1;
        std::fprintf(stderr, "%s\n", record.dump().c_str());
        return 3;
    } catch (const io_error& e) {
        json record;
        record["error"] = {{"exit", 4}, {"kind", "io"}, {"message", e.what()}};
        std::fprintf(stderr, "%s\n", record.dump().c_str());
        return 4;
    } catch (const std::exception& e) {
        json record;
        record["error"] = {{"exit", 3}, {"kind", "internal"}, {"message", e.what()}};
        std::fprintf(stderr, "%s\n", record.dump().c_str());
        return 3;
    }
}

}  // namespace chebrec
