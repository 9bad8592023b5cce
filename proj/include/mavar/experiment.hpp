#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mavar/estimate.hpp"
#include "mavar/synth.hpp"

namespace mavar {

enum class ExperimentKind { accuracy, convergence, step_robustness, trace };

const char* to_string(ExperimentKind kind);

// Seeded ensemble experiment over target Hurst values, series lengths and
// (for the step sweep) contamination parameters. Per-cell seeds derive from
// (master_seed, value index, length index, replicate index), so cells are
// independent and any one can be re-run alone. Re-running a config gives
// byte-identical report CSVs.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::accuracy;
    std::vector<double> hurst_values = {0.50, 0.55, 0.60, 0.65, 0.70, 0.75,
                                        0.80, 0.85, 0.90, 0.95, 1.00};
    std::vector<std::size_t> lengths = {131072};
    int seeds_per_cell = 10;
    std::vector<double> step_amplitudes = {0.0, 0.5, 1.0, 2.0};
    std::vector<double> step_delays = {0.05, 0.25, 0.50, 0.75, 0.95}; // fractions of N
    std::size_t gen_length = 0; // convergence only: generated length, 0 = max of lengths
    std::uint64_t master_seed = 1;
    double tau0 = 1.0;
    AmplitudeMode mode = AmplitudeMode::rayleigh;
    std::vector<EstimateMethod> methods = {EstimateMethod::mavar};
    FitOptions fit;
    std::string output_dir; // empty: no per-cell artifact files
};

void validate_config(const ExperimentConfig& config);

// One aggregated cell. `estimates` holds the per-seed values (H estimates,
// or H shifts against the zero-amplitude baseline in the step sweep).
struct CellResult {
    EstimateMethod method = EstimateMethod::mavar;
    double h_true = 0.0;
    std::size_t n = 0;
    double amplitude = std::numeric_limits<double>::quiet_NaN(); // step sweep
    double delay_fraction = std::numeric_limits<double>::quiet_NaN();
    int seed_index = -1; // convergence: per-seed rows
    std::vector<double> estimates;
    double mean_estimate = 0.0;
    double mean_error = 0.0;
    double std_error = 0.0;
    bool single_seed = false;
    std::string failure; // non-empty: cell failed, run continued
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CellResult> rows;
    double wall_seconds = 0.0;
    std::string version;
};

// Generates seeds_per_cell series per (H, N), estimates H with every enabled
// method on the same series, and aggregates mean/std of the estimation error
// per cell. Row order: method-major, then H, then N.
ExperimentReport run_accuracy_experiment(const ExperimentConfig& config);

// Generates one long series per seed and re-estimates H on truncated
// prefixes; one row per (seed, length). H defaults to the first configured
// value (0.75 unless overridden).
ExperimentReport run_convergence_experiment(const ExperimentConfig& config);

// Adds steps of each configured amplitude and delay to the same base noise
// (H from config, default 0.80) and records the H shift against the A = 0
// baseline, per (N, A, M) cell. Writes one contaminated curve CSV per cell
// (first replicate) when output_dir is set.
ExperimentReport run_step_robustness(const ExperimentConfig& config);

// Report CSV (schema depends on the experiment kind; header row always
// present, full precision, no timestamps) and pretty-printed JSON with the
// config echo, per-seed estimates and wall time.
void write_report_csv(const ExperimentReport& report, const std::string& path);
std::string report_to_json_text(const ExperimentReport& report);

// Minimal CSV-with-header reader used to load report and plot files back.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

} // namespace mavar
