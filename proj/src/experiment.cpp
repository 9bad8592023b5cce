#include "mavar/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mavar/fft.hpp"
#include "mavar/parallel.hpp"
#include "mavar/rng.hpp"
#include "mavar/textio.hpp"

namespace mavar {

namespace {

constexpr const char* kVersion = "0.1.0";

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<std::int64_t> default_vtp_windows(std::size_t n) {
    std::vector<std::int64_t> windows;
    for (std::int64_t w = 1; w <= static_cast<std::int64_t>(n / 16); w *= 2) {
        windows.push_back(w);
    }
    return windows;
}

double estimate_hurst(const TimeSeries& x, EstimateMethod method, const FitOptions& fit) {
    switch (method) {
    case EstimateMethod::mavar: {
        TauGrid grid = make_tau_grid(x.size());
        MavarCurve curve = mavar_fast(x, grid);
        return hurst_from_slope(fit_slope(curve, fit)).hurst;
    }
    case EstimateMethod::haar_ld:
        return haar_logscale_diagram(x).estimate.hurst;
    case EstimateMethod::periodogram:
        return periodogram_estimate(x).estimate.hurst;
    case EstimateMethod::variance_time:
        return variance_time_plot(x, default_vtp_windows(x.size())).estimate.hurst;
    }
    throw std::logic_error("unreachable");
}

void finalize_cell(CellResult& cell, double h_true, int seeds) {
    cell.h_true = h_true;
    cell.single_seed = seeds == 1;
    if (cell.estimates.empty()) return;
    cell.mean_estimate = mean_of(cell.estimates);
    cell.mean_error = cell.mean_estimate - h_true;
    cell.std_error = sample_std(cell.estimates);
}

} // namespace

const char* to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::accuracy: return "accuracy";
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::step_robustness: return "step-robustness";
    case ExperimentKind::trace: return "trace";
    }
    return "?";
}

void validate_config(const ExperimentConfig& config) {
    if (config.seeds_per_cell < 1) {
        throw std::invalid_argument("experiment: seeds_per_cell must be >= 1");
    }
    if (config.hurst_values.empty() || config.lengths.empty()) {
        throw std::invalid_argument("experiment: need at least one H value and one length");
    }
    for (double h : config.hurst_values) {
        if (!(h >= 0.5) || !(h <= 1.0)) {
            throw std::invalid_argument("experiment: H values must lie in [0.5, 1.0]");
        }
    }
    for (std::size_t n : config.lengths) {
        if (n < 8 || !is_power_of_two(n)) {
            throw std::invalid_argument("experiment: lengths must be powers of two >= 8");
        }
    }
    for (double d : config.step_delays) {
        if (!(d > 0.0) || !(d < 1.0)) {
            throw std::invalid_argument("experiment: step delays are fractions in (0, 1)");
        }
    }
    if (config.methods.empty()) {
        throw std::invalid_argument("experiment: need at least one method");
    }
}

ExperimentReport run_accuracy_experiment(const ExperimentConfig& config) {
    validate_config(config);
    const auto t0 = std::chrono::steady_clock::now();

    const std::size_t n_h = config.hurst_values.size();
    const std::size_t n_len = config.lengths.size();
    const std::size_t reps = static_cast<std::size_t>(config.seeds_per_cell);
    const std::size_t n_methods = config.methods.size();

    // one generated series per (H, N, rep); every method sees the same series
    const std::size_t tasks = n_h * n_len * reps;
    std::vector<std::vector<double>> task_estimates(tasks,
                                                    std::vector<double>(n_methods, 0.0));
    std::vector<std::vector<std::string>> task_failures(tasks,
                                                        std::vector<std::string>(n_methods));

    parallel_for(tasks, [&](std::size_t t) {
        const std::size_t ih = t / (n_len * reps);
        const std::size_t in = (t / reps) % n_len;
        const std::size_t rep = t % reps;

        GeneratorSpec spec;
        spec.n = config.lengths[in];
        spec.alpha = hurst_to_alpha(config.hurst_values[ih]);
        spec.seed = derive_seed(config.master_seed, ih, in, rep);
        spec.mode = config.mode;
        spec.normalize = true;
        try {
            TimeSeries x = gen_lrd(spec, config.tau0);
            for (std::size_t mi = 0; mi < n_methods; ++mi) {
                try {
                    task_estimates[t][mi] = estimate_hurst(x, config.methods[mi], config.fit);
                } catch (const std::exception& e) {
                    task_failures[t][mi] = e.what();
                }
            }
        } catch (const std::exception& e) {
            for (std::size_t mi = 0; mi < n_methods; ++mi) task_failures[t][mi] = e.what();
        }
    });

    ExperimentReport report;
    report.config = config;
    report.version = kVersion;
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
        for (std::size_t ih = 0; ih < n_h; ++ih) {
            for (std::size_t in = 0; in < n_len; ++in) {
                CellResult cell;
                cell.method = config.methods[mi];
                cell.n = config.lengths[in];
                for (std::size_t rep = 0; rep < reps; ++rep) {
                    const std::size_t t = (ih * n_len + in) * reps + rep;
                    if (!task_failures[t][mi].empty()) {
                        cell.failure = task_failures[t][mi];
                        continue;
                    }
                    cell.estimates.push_back(task_estimates[t][mi]);
                }
                if (!cell.failure.empty()) cell.estimates.clear();
                finalize_cell(cell, config.hurst_values[ih], config.seeds_per_cell);
                report.rows.push_back(std::move(cell));
            }
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

ExperimentReport run_convergence_experiment(const ExperimentConfig& config) {
    validate_config(config);
    const auto t0 = std::chrono::steady_clock::now();

    const double h_true = config.hurst_values.front();
    std::size_t gen_length = config.gen_length;
    if (gen_length == 0) {
        for (std::size_t n : config.lengths) gen_length = std::max(gen_length, n);
    }
    const std::size_t reps = static_cast<std::size_t>(config.seeds_per_cell);
    const std::size_t n_len = config.lengths.size();

    ExperimentReport report;
    report.config = config;
    report.version = kVersion;
    report.rows.resize(reps * n_len);

    parallel_for(reps, [&](std::size_t rep) {
        GeneratorSpec spec;
        spec.n = gen_length;
        spec.alpha = hurst_to_alpha(h_true);
        spec.seed = derive_seed(config.master_seed, 0, 0, rep);
        spec.mode = config.mode;
        spec.normalize = true;
        TimeSeries full = gen_lrd(spec, config.tau0);

        for (std::size_t in = 0; in < n_len; ++in) {
            CellResult& cell = report.rows[rep * n_len + in];
            cell.method = EstimateMethod::mavar;
            cell.n = config.lengths[in];
            cell.seed_index = static_cast<int>(rep);
            try {
                if (config.lengths[in] > gen_length) {
                    throw std::invalid_argument("truncation length exceeds generated length");
                }
                TimeSeries prefix = make_series(
                    std::vector<double>(full.samples.begin(),
                                        full.samples.begin() +
                                            static_cast<std::ptrdiff_t>(config.lengths[in])),
                    full.tau0, full.role, full.label);
                cell.estimates.push_back(estimate_hurst(prefix, EstimateMethod::mavar, config.fit));
            } catch (const std::exception& e) {
                cell.failure = e.what();
            }
            finalize_cell(cell, h_true, 1);
        }
    });

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

ExperimentReport run_step_robustness(const ExperimentConfig& config) {
    validate_config(config);
    const auto t0 = std::chrono::steady_clock::now();

    const double h_true = config.hurst_values.front();
    const std::size_t n_len = config.lengths.size();
    const std::size_t reps = static_cast<std::size_t>(config.seeds_per_cell);
    const std::size_t n_amp = config.step_amplitudes.size();
    const std::size_t n_del = config.step_delays.size();

    struct SeedOutcome {
        std::vector<double> shifts;     // per (A, M) flattened
        std::vector<double> estimates;  // contaminated H estimates
        std::string failure;
    };
    std::vector<SeedOutcome> outcomes(n_len * reps);

    parallel_for(n_len * reps, [&](std::size_t t) {
        const std::size_t in = t / reps;
        const std::size_t rep = t % reps;
        SeedOutcome& out = outcomes[t];
        const std::size_t n = config.lengths[in];
        try {
            GeneratorSpec spec;
            spec.n = n;
            spec.alpha = hurst_to_alpha(h_true);
            spec.seed = derive_seed(config.master_seed, 0, in, rep);
            spec.mode = config.mode;
            spec.normalize = true;
            TimeSeries base = gen_lrd(spec, config.tau0);
            const double h_base = estimate_hurst(base, EstimateMethod::mavar, config.fit);

            for (std::size_t ia = 0; ia < n_amp; ++ia) {
                for (std::size_t id = 0; id < n_del; ++id) {
                    std::size_t m = static_cast<std::size_t>(
                        std::llround(config.step_delays[id] * static_cast<double>(n)));
                    m = std::min(std::max<std::size_t>(m, 2), n - 1);
                    TimeSeries contaminated =
                        apply_contaminant(base, make_step(config.step_amplitudes[ia], m));
                    const double h =
                        estimate_hurst(contaminated, EstimateMethod::mavar, config.fit);
                    out.estimates.push_back(h);
                    out.shifts.push_back(h - h_base);
                    if (rep == 0 && !config.output_dir.empty()) {
                        MavarCurve curve =
                            mavar_fast(contaminated, make_tau_grid(contaminated.size()));
                        const std::string name =
                            "step_n" + std::to_string(n) + "_a" +
                            format_double(config.step_amplitudes[ia]) + "_m" +
                            format_double(config.step_delays[id]) + ".csv";
                        write_curve_csv(curve,
                                        (std::filesystem::path(config.output_dir) / name).string());
                    }
                }
            }
        } catch (const std::exception& e) {
            out.failure = e.what();
        }
    });

    ExperimentReport report;
    report.config = config;
    report.version = kVersion;
    for (std::size_t in = 0; in < n_len; ++in) {
        for (std::size_t ia = 0; ia < n_amp; ++ia) {
            for (std::size_t id = 0; id < n_del; ++id) {
                CellResult cell;
                cell.method = EstimateMethod::mavar;
                cell.n = config.lengths[in];
                cell.amplitude = config.step_amplitudes[ia];
                cell.delay_fraction = config.step_delays[id];
                std::vector<double> h_values;
                for (std::size_t rep = 0; rep < reps; ++rep) {
                    const SeedOutcome& out = outcomes[in * reps + rep];
                    if (!out.failure.empty()) {
                        cell.failure = out.failure;
                        continue;
                    }
                    cell.estimates.push_back(out.shifts[ia * n_del + id]);
                    h_values.push_back(out.estimates[ia * n_del + id]);
                }
                if (!cell.failure.empty()) {
                    cell.estimates.clear();
                    h_values.clear();
                }
                cell.h_true = h_true;
                cell.single_seed = reps == 1;
                if (!cell.estimates.empty()) {
                    cell.mean_error = mean_of(cell.estimates); // mean H shift
                    cell.std_error = sample_std(cell.estimates);
                    cell.mean_estimate = mean_of(h_values);
                }
                report.rows.push_back(std::move(cell));
            }
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void write_report_csv(const ExperimentReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);

    const auto num = [](double v) { return format_double(v); };
    switch (report.config.kind) {
    case ExperimentKind::accuracy:
    case ExperimentKind::trace:
        out << "method,H_true,N,mean_err,std_err\n";
        for (const auto& r : report.rows) {
            out << to_string(r.method) << ',' << num(r.h_true) << ',' << r.n << ','
                << (r.failure.empty() ? num(r.mean_error) : "nan") << ','
                << (r.failure.empty() ? num(r.std_error) : "nan") << "\n";
        }
        break;
    case ExperimentKind::convergence:
        out << "seed,N,H_true,H_est,err\n";
        for (const auto& r : report.rows) {
            out << r.seed_index << ',' << r.n << ',' << num(r.h_true) << ','
                << (r.failure.empty() ? num(r.mean_estimate) : "nan") << ','
                << (r.failure.empty() ? num(r.mean_error) : "nan") << "\n";
        }
        break;
    case ExperimentKind::step_robustness:
        out << "method,H_true,N,amplitude,delay_frac,mean_shift,std_shift,mean_est\n";
        for (const auto& r : report.rows) {
            out << to_string(r.method) << ',' << num(r.h_true) << ',' << r.n << ','
                << num(r.amplitude) << ',' << num(r.delay_fraction) << ','
                << (r.failure.empty() ? num(r.mean_error) : "nan") << ','
                << (r.failure.empty() ? num(r.std_error) : "nan") << ','
                << (r.failure.empty() ? num(r.mean_estimate) : "nan") << "\n";
        }
        break;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string report_to_json_text(const ExperimentReport& report) {
    nlohmann::json j;
    const ExperimentConfig& c = report.config;
    nlohmann::json jc;
    jc["experiment"] = to_string(c.kind);
    jc["hurst_values"] = c.hurst_values;
    jc["lengths"] = c.lengths;
    jc["seeds_per_cell"] = c.seeds_per_cell;
    jc["step_amplitudes"] = c.step_amplitudes;
    jc["step_delays"] = c.step_delays;
    jc["master_seed"] = c.master_seed;
    jc["tau0"] = c.tau0;
    jc["mode"] = to_string(c.mode);
    nlohmann::json methods = nlohmann::json::array();
    for (auto m : c.methods) methods.push_back(to_string(m));
    jc["methods"] = std::move(methods);
    jc["fit"] = {{"n_lo", c.fit.n_lo},
                 {"tail_fraction", c.fit.tail_fraction},
                 {"weighting", to_string(c.fit.weighting)}};
    j["config"] = std::move(jc);

    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row;
        row["method"] = to_string(r.method);
        row["H_true"] = r.h_true;
        row["N"] = r.n;
        if (!std::isnan(r.amplitude)) row["amplitude"] = r.amplitude;
        if (!std::isnan(r.delay_fraction)) row["delay_frac"] = r.delay_fraction;
        if (r.seed_index >= 0) row["seed"] = r.seed_index;
        row["estimates"] = r.estimates;
        row["mean_est"] = r.mean_estimate;
        row["mean_err"] = r.mean_error;
        row["std_err"] = r.std_error;
        if (r.single_seed) row["single_seed_warning"] = true;
        if (!r.failure.empty()) row["failure"] = r.failure;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    if (report.config.kind == ExperimentKind::convergence) {
        j["notes"] = "truncation lengths are powers of two (generator constraint)";
    }
    j["version"] = report.version;
    j["wall_seconds"] = report.wall_seconds;
    return j.dump(2);
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::runtime_error("csv: no column named '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
    return parse_double(rows.at(row).at(column(name)), "csv");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        for (auto f : split_on(line, ',')) fields.emplace_back(f);
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    if (first) throw std::runtime_error(path + ": empty CSV");
    return table;
}

} // namespace mavar
