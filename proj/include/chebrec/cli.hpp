#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chebrec/diagnostics.hpp"
#include "chebrec/recovery.hpp"

namespace chebrec {

enum class ObservationsMode { none, values, coefficients, function };

/// A fully resolved run configuration: generators already expanded (using the
/// seed), tolerance overrides applied. Observations stay symbolic until a map
/// exists, since coefficient and function specs need the basis and the grid.
struct RunConfig {
    SystemKind kind = SystemKind::polynomial;
    int n = 0;
    std::vector<double> params;

    std::vector<double> points;
    std::vector<double> probes;

    ObservationsMode obs_mode = ObservationsMode::none;
    std::vector<double> obs_data;   ///< y values or basis coefficients
    std::string obs_function;       ///< one of abs, runge, sin

    std::vector<std::string> outputs;  ///< subset of the artifact names, canonical order

    SimplexOptions tolerances;
    MaximizeOptions maximize;

    std::vector<double> audit_epsilons{0.01};
    int audit_trials = 200;
    int audit_density = 501;

    unsigned long long seed = 0;
    int threads = 1;

    /// Deterministic rendering of everything that affects results (threads
    /// excluded); its digest fingerprints the run in reports.
    [[nodiscard]] std::string canonical() const;
};

/// Parses and validates the JSON text of a config file. seed_override /
/// threads_override (from CLI flags) are applied before point generation, so
/// the generated grid reflects the effective seed. Throws config_error.
[[nodiscard]] RunConfig parse_config(const std::string& json_text,
                                     std::optional<unsigned long long> seed_override = {},
                                     std::optional<int> threads_override = {});

/// Reads and parses a config file; io_error when unreadable.
[[nodiscard]] RunConfig load_config(const std::string& path,
                                    std::optional<unsigned long long> seed_override = {},
                                    std::optional<int> threads_override = {});

/// Writes the sample table: header "x,asharp_1,...,asharp_m[,delta]", one
/// probe per row ascending, 17 significant digits. y adds the delta column.
void emit_samples(const PiecewiseRecoveryMap& map, const std::vector<double>* y,
                  std::span<const double> probes, std::ostream& out);

enum class Subcommand { build, eval, ratio, audit, insert };

struct CommandRequest {
    Subcommand cmd = Subcommand::build;
    RunConfig config;
    bool have_config = false;  ///< insert may run with defaults only
    std::string out_dir;
    double insert_point = 0.0;
    InsertStrategy strategy = InsertStrategy::warm;
};

struct PhaseTiming {
    std::string phase;
    double seconds = 0.0;
};

/// Everything a run reports. render() is the deterministic report document;
/// timings are kept out of it and go to stdout only.
struct RunReport {
    struct SubintervalLine {
        int index = 0;  ///< 0-based in memory, printed 1-based
        double left = 0.0;
        double right = 0.0;
        std::vector<int> support;
        int pivots = 0;
        bool warm = false;
    };

    std::string tool = "chebrec 0.1.0";
    std::string config_digest;
    SystemKind kind = SystemKind::polynomial;
    int n = 0;
    std::vector<double> params;
    int m = 0;
    std::vector<SubintervalLine> subintervals;
    std::string map_file;
    std::optional<RatioReport> ratio;
    std::vector<WceAudit> audits;
    std::vector<std::string> artifacts;       ///< file names written, in order
    std::vector<PhaseTiming> timings;         ///< stdout only, never serialized

    [[nodiscard]] std::string render() const;
};

/// Executes one subcommand against the workspace directory, writing its
/// artifacts there. Throws config_error / numerical_error / io_error.
RunReport execute(const CommandRequest& request);

/// Full command-line entry: flag parsing, error records on stderr, exit codes
/// 0 / 2 (config) / 3 (numerical) / 4 (I/O).
int cli_main(int argc, const char* const* argv);

}  // namespace chebrec
