// Command-line front end: trace analysis, LRD series synthesis, and the
// seeded validation experiments, all emitting CSV/JSON plot data.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mavar/engine.hpp"
#include "mavar/estimate.hpp"
#include "mavar/experiment.hpp"
#include "mavar/series.hpp"
#include "mavar/synth.hpp"
#include "mavar/textio.hpp"

namespace {

// exit codes: 0 success, 1 input/config error, 2 analysis-validity failure
constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kAnalysisError = 2;

namespace fs = std::filesystem;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

fs::path ensure_out_dir(const std::string& out_dir) {
    fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<mavar::EstimateMethod> parse_methods(const std::vector<std::string>& names) {
    std::vector<mavar::EstimateMethod> methods;
    for (const auto& name : names) methods.push_back(mavar::estimate_method_from_string(name));
    if (methods.empty()) methods.push_back(mavar::EstimateMethod::mavar);
    return methods;
}

struct FitFlags {
    std::int64_t n_lo = 5;
    double tail_fraction = 0.1;
    std::string weighting = "edf";

    mavar::FitOptions options() const {
        mavar::FitOptions fit;
        fit.n_lo = n_lo;
        fit.tail_fraction = tail_fraction;
        fit.weighting = mavar::fit_weighting_from_string(weighting);
        return fit;
    }
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
    cmd->add_option("--n-lo", flags.n_lo, "smallest averaging factor used in fits");
    cmd->add_option("--tail", flags.tail_fraction,
                    "keep n <= (N/3)*tail in fits (default 0.1, one decade below the cap)");
    cmd->add_option("--weighting", flags.weighting, "fit weighting: edf|confidence|uniform")
        ->check(CLI::IsMember({"edf", "confidence", "uniform"}));
}

int cmd_analyze(const std::string& input, const std::string& format_name, double tau0,
                const std::string& role_name, int segments, const FitFlags& fit_flags,
                const std::vector<std::string>& method_names, double grid_ratio,
                const std::string& out_dir) {
    mavar::TimeSeries series;
    try {
        auto format = format_name == "two-column" ? mavar::SeriesFormat::two_column
                                                  : mavar::SeriesFormat::one_column;
        series = mavar::load_series(input, format, tau0, mavar::series_role_from_string(role_name));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        const fs::path dir = ensure_out_dir(out_dir);
        const std::string stem = fs::path(input).stem().string();

        mavar::TauGrid grid = mavar::make_tau_grid(series.size(), grid_ratio);
        mavar::MavarCurve curve = mavar::mavar_fast(series, grid);
        const fs::path curve_path = dir / (stem + "_curve.csv");
        mavar::write_curve_csv(curve, curve_path.string());

        const mavar::FitOptions fit_options = fit_flags.options();
        mavar::SlopeFit fit = mavar::fit_slope(curve, fit_options);
        mavar::HurstEstimate estimate = mavar::hurst_from_slope(fit);

        mavar::SegmentedFit segmented;
        const mavar::SegmentedFit* segmented_ptr = nullptr;
        if (segments >= 2) {
            segmented = mavar::fit_segments(curve, segments, fit_options);
            segmented_ptr = &segmented;
        }

        nlohmann::json j =
            nlohmann::json::parse(mavar::estimate_report_json(estimate, fit, segmented_ptr));
        j["input"] = input;
        j["n_samples"] = series.size();
        j["tau0"] = series.tau0;
        j["role_used"] = mavar::to_string(series.role);
        j["curve_csv"] = curve_path.string();

        for (auto method : parse_methods(method_names)) {
            try {
                switch (method) {
                case mavar::EstimateMethod::mavar:
                    break; // already the main result
                case mavar::EstimateMethod::haar_ld: {
                    auto ld = mavar::haar_logscale_diagram(series);
                    j["baselines"]["haarld"] = {{"H", ld.estimate.hurst},
                                                {"gamma", ld.estimate.gamma},
                                                {"lrd_valid", ld.estimate.lrd_valid}};
                    break;
                }
                case mavar::EstimateMethod::periodogram: {
                    auto pg = mavar::periodogram_estimate(series);
                    j["baselines"]["periodogram"] = {{"H", pg.estimate.hurst},
                                                     {"alpha", pg.estimate.alpha},
                                                     {"lrd_valid", pg.estimate.lrd_valid}};
                    break;
                }
                case mavar::EstimateMethod::variance_time: {
                    mavar::TimeSeries rate = series.role == mavar::SeriesRole::cumulative
                                                 ? mavar::differentiate(series)
                                                 : series;
                    std::vector<std::int64_t> windows;
                    for (std::int64_t w = 1; w <= static_cast<std::int64_t>(rate.size() / 16);
                         w *= 2) {
                        windows.push_back(w);
                    }
                    auto vt = mavar::variance_time_plot(rate, windows);
                    j["baselines"]["vtp"] = {{"H", vt.estimate.hurst},
                                             {"slope", vt.estimate.mu},
                                             {"lrd_valid", vt.estimate.lrd_valid}};
                    break;
                }
                }
            } catch (const std::exception& e) {
                j["baselines"][mavar::to_string(method)] = {{"failure", e.what()}};
            }
        }

        const fs::path json_path = dir / (stem + "_estimate.json");
        write_text_file(json_path.string(), j.dump(2) + "\n");

        std::cout << "H = " << mavar::format_double(estimate.hurst)
                  << " (mu = " << mavar::format_double(estimate.mu)
                  << ", alpha = " << mavar::format_double(estimate.alpha)
                  << ", lrd_valid = " << (estimate.lrd_valid ? "true" : "false") << ")\n";
        if (segmented_ptr) {
            for (std::size_t i = 0; i < segmented.segments.size(); ++i) {
                const auto& s = segmented.segments[i];
                std::cout << "segment " << i + 1 << ": mu = " << mavar::format_double(s.mu)
                          << " over tau [" << mavar::format_double(s.tau_lo) << ", "
                          << mavar::format_double(s.tau_hi) << "]\n";
            }
        }
        std::cout << "wrote " << curve_path.string() << " and " << json_path.string() << "\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return kAnalysisError;
    }
}

int cmd_generate(const std::string& spec_path, const std::string& spec_inline,
                 const std::string& contaminants_path, double tau0, const std::string& output) {
    try {
        std::string spec_text;
        if (!spec_path.empty()) {
            spec_text = read_text_file(spec_path);
        } else if (!spec_inline.empty()) {
            spec_text = spec_inline;
        } else {
            throw std::invalid_argument("need --spec FILE or --spec-json TEXT");
        }
        mavar::GeneratorSpec spec = mavar::generator_spec_from_json_text(spec_text);

        std::vector<mavar::Contaminant> contaminants;
        if (!contaminants_path.empty()) {
            contaminants = mavar::contaminants_from_json_text(read_text_file(contaminants_path));
        }

        mavar::TimeSeries series = mavar::gen_lrd(spec, tau0);
        for (const auto& c : contaminants) series = mavar::apply_contaminant(series, c);

        mavar::write_series_one_column(series, output);

        nlohmann::json sidecar;
        sidecar["spec"] = nlohmann::json::parse(mavar::generator_spec_to_json_text(spec));
        sidecar["contaminants"] =
            nlohmann::json::parse(mavar::contaminants_to_json_text(contaminants));
        sidecar["tau0"] = tau0;
        sidecar["output"] = output;
        write_text_file(output + ".json", sidecar.dump(2) + "\n");

        std::cout << "wrote " << output << " (" << series.size() << " samples)\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}

int run_and_write(const mavar::ExperimentConfig& config, const std::string& out_dir,
                  const std::string& format) {
    try {
        mavar::validate_config(config);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kInputError;
    }
    try {
        mavar::ExperimentConfig cfg = config;
        const fs::path dir = ensure_out_dir(out_dir);
        cfg.output_dir = dir.string();

        mavar::ExperimentReport report;
        switch (cfg.kind) {
        case mavar::ExperimentKind::accuracy:
            report = mavar::run_accuracy_experiment(cfg);
            break;
        case mavar::ExperimentKind::convergence:
            report = mavar::run_convergence_experiment(cfg);
            break;
        case mavar::ExperimentKind::step_robustness:
            report = mavar::run_step_robustness(cfg);
            break;
        case mavar::ExperimentKind::trace:
            throw std::invalid_argument("trace analysis runs through `analyze`");
        }

        const std::string stem = to_string(cfg.kind);
        const fs::path csv_path = dir / (stem + "_report.csv");
        if (format == "csv" || format == "both") {
            mavar::write_report_csv(report, csv_path.string());
            std::cout << "wrote " << csv_path.string() << "\n";
        }
        if (format == "json" || format == "both") {
            const fs::path json_path = dir / (stem + "_report.json");
            write_text_file(json_path.string(), mavar::report_to_json_text(report) + "\n");
            std::cout << "wrote " << json_path.string() << "\n";
        }
        std::cout << "rows: " << report.rows.size() << ", wall: " << report.wall_seconds
                  << " s\n";
        for (const auto& row : report.rows) {
            if (!row.failure.empty()) {
                std::cerr << "cell failure (H=" << row.h_true << ", N=" << row.n
                          << "): " << row.failure << "\n";
            }
        }
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "experiment error: " << e.what() << "\n";
        return kAnalysisError;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modified-Allan-variance analysis of long-range dependent series"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir;
    app.add_option("--out", out_dir, "output directory (default: MAVAR_OUT_DIR or .)")
        ->envname("MAVAR_OUT_DIR");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "estimate H and noise exponents of a series");
    std::string in_path, in_format = "one-column", in_role = "rate";
    double tau0 = 1.0, grid_ratio = 1.1;
    int segments = 2;
    FitFlags fit_flags;
    std::vector<std::string> methods;
    analyze->add_option("input", in_path, "series file")->required();
    analyze->add_option("--input-format", in_format, "one-column|two-column")
        ->check(CLI::IsMember({"one-column", "two-column"}));
    analyze->add_option("--tau0", tau0, "sampling period in seconds (one-column input)");
    analyze->add_option("--role", in_role, "rate|cumulative")
        ->check(CLI::IsMember({"rate", "cumulative"}));
    analyze->add_option("--segments", segments, "piecewise fit segment count (1..3)")
        ->check(CLI::Range(1, 3));
    analyze->add_option("--ratio", grid_ratio, "tau grid ratio (default 1.1)");
    analyze->add_option("--methods", methods,
                        "baseline estimators to run: mavar,vtp,periodogram,haarld")
        ->delimiter(',');
    add_fit_flags(analyze, fit_flags);

    // generate
    auto* generate = app.add_subcommand("generate", "synthesize a power-law noise series");
    std::string spec_path, spec_inline, contaminants_path, gen_output = "series.txt";
    double gen_tau0 = 1.0;
    std::size_t gen_n = 0;
    double gen_hurst = -1.0, gen_alpha = 1.0;
    std::uint64_t gen_seed = 0;
    std::string gen_mode = "rayleigh";
    bool gen_no_normalize = false;
    generate->add_option("--spec", spec_path, "generator spec JSON file");
    generate->add_option("--spec-json", spec_inline, "generator spec JSON text");
    generate->add_option("--n", gen_n, "series length (power of two)");
    generate->add_option("--hurst", gen_hurst, "target Hurst parameter in [0.5, 1]");
    generate->add_option("--alpha", gen_alpha, "spectral exponent in (-5, 0]");
    generate->add_option("--seed", gen_seed, "generator seed");
    generate->add_option("--mode", gen_mode, "rayleigh|deterministic")
        ->check(CLI::IsMember({"rayleigh", "deterministic"}));
    generate->add_flag("--no-normalize", gen_no_normalize, "keep raw scale");
    generate->add_option("--contaminants", contaminants_path, "contaminant list JSON file");
    generate->add_option("--tau0", gen_tau0, "sampling period in seconds");
    generate->add_option("--output", gen_output, "series output path");

    // experiments
    std::vector<double> h_list;
    std::vector<std::size_t> n_list;
    int seeds = 0;
    std::uint64_t master_seed = 1;
    double exp_tau0 = 1.0;
    std::vector<std::string> exp_methods;
    std::vector<double> amplitudes, delays;
    std::string report_format = "both";
    FitFlags exp_fit;

    auto add_experiment_flags = [&](CLI::App* cmd) {
        cmd->add_option("--h-list", h_list, "target H values")->delimiter(',');
        cmd->add_option("--n-list", n_list, "series lengths (powers of two)")->delimiter(',');
        cmd->add_option("--seeds", seeds, "replicates per cell");
        cmd->add_option("--seed", master_seed, "master seed");
        cmd->add_option("--tau0", exp_tau0, "sampling period in seconds");
        cmd->add_option("--methods", exp_methods, "estimators: mavar,vtp,periodogram,haarld")
            ->delimiter(',');
        cmd->add_option("--format", report_format, "report format: csv|json|both")
            ->check(CLI::IsMember({"csv", "json", "both"}));
        add_fit_flags(cmd, exp_fit);
    };

    auto* accuracy = app.add_subcommand("accuracy", "ensemble H-estimation accuracy sweep");
    add_experiment_flags(accuracy);
    auto* convergence =
        app.add_subcommand("convergence", "H-estimate error vs truncated series length");
    add_experiment_flags(convergence);
    auto* step =
        app.add_subcommand("step-sweep", "H-estimate robustness against superposed steps");
    add_experiment_flags(step);
    step->add_option("--amplitudes", amplitudes, "step amplitudes")->delimiter(',');
    step->add_option("--delays", delays, "step delays as fractions of N")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed()) {
        return cmd_analyze(in_path, in_format, tau0, in_role, segments, fit_flags, methods,
                           grid_ratio, out_dir);
    }

    if (generate->parsed()) {
        std::string inline_spec = spec_inline;
        if (spec_path.empty() && inline_spec.empty()) {
            // assemble a spec from flags
            nlohmann::json j;
            if (gen_n == 0) {
                std::cerr << "error: need --spec, --spec-json, or --n with --hurst/--alpha\n";
                return kInputError;
            }
            j["n"] = gen_n;
            if (gen_hurst >= 0.0) {
                j["hurst"] = gen_hurst;
            } else if (gen_alpha <= 0.0) {
                j["alpha"] = gen_alpha;
            } else {
                std::cerr << "error: need --hurst or --alpha\n";
                return kInputError;
            }
            j["seed"] = gen_seed;
            j["mode"] = gen_mode;
            j["normalize"] = !gen_no_normalize;
            inline_spec = j.dump();
        }
        fs::path out = fs::path(gen_output);
        if (!out_dir.empty() && out.is_relative()) {
            ensure_out_dir(out_dir);
            out = fs::path(out_dir) / out;
        }
        return cmd_generate(spec_path, inline_spec, contaminants_path, gen_tau0, out.string());
    }

    mavar::ExperimentConfig config;
    config.master_seed = master_seed;
    config.tau0 = exp_tau0;
    config.fit = exp_fit.options();
    if (!h_list.empty()) config.hurst_values = h_list;
    if (!n_list.empty()) config.lengths = n_list;
    try {
        if (!exp_methods.empty()) config.methods = parse_methods(exp_methods);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kInputError;
    }

    if (accuracy->parsed()) {
        config.kind = mavar::ExperimentKind::accuracy;
        config.seeds_per_cell = seeds > 0 ? seeds : 10;
    } else if (convergence->parsed()) {
        config.kind = mavar::ExperimentKind::convergence;
        config.seeds_per_cell = seeds > 0 ? seeds : 4;
        if (h_list.empty()) config.hurst_values = {0.75};
        if (n_list.empty()) config.lengths = {1024, 2048, 4096, 8192, 16384, 32768, 65536};
    } else if (step->parsed()) {
        config.kind = mavar::ExperimentKind::step_robustness;
        config.seeds_per_cell = seeds > 0 ? seeds : 10;
        if (h_list.empty()) config.hurst_values = {0.80};
        if (n_list.empty()) config.lengths = {1024, 131072};
        if (!amplitudes.empty()) config.step_amplitudes = amplitudes;
        if (!delays.empty()) config.step_delays = delays;
    }
    return run_and_write(config, out_dir, report_format);
}
