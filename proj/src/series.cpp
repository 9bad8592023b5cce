#include "mavar/series.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mavar/textio.hpp"

namespace mavar {

const char* to_string(SeriesRole role) {
    return role == SeriesRole::rate ? "rate" : "cumulative";
}

SeriesRole series_role_from_string(const std::string& text) {
    if (text == "rate") return SeriesRole::rate;
    if (text == "cumulative") return SeriesRole::cumulative;
    throw std::invalid_argument("unknown series role: '" + text + "'");
}

TimeSeries make_series(std::vector<double> samples, double tau0, SeriesRole role,
                       std::string label) {
    if (!(tau0 > 0.0) || !std::isfinite(tau0)) {
        throw std::invalid_argument("tau0 must be positive and finite");
    }
    for (double v : samples) {
        if (!std::isfinite(v)) throw std::invalid_argument("series contains a non-finite sample");
    }
    TimeSeries out;
    out.samples = std::move(samples);
    out.tau0 = tau0;
    out.role = role;
    out.label = std::move(label);
    return out;
}

namespace {

std::vector<std::string> read_data_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        lines.emplace_back(t);
    }
    return lines;
}

} // namespace

TimeSeries load_series(const std::string& path, SeriesFormat format, double tau0,
                       SeriesRole role) {
    auto lines = read_data_lines(path);

    std::vector<double> samples;
    samples.reserve(lines.size());

    if (format == SeriesFormat::one_column) {
        for (size_t i = 0; i < lines.size(); ++i) {
            auto fields = split_fields(lines[i]);
            if (fields.size() != 1) {
                throw std::runtime_error(path + ": line " + std::to_string(i + 1) +
                                         ": expected a single value");
            }
            samples.push_back(parse_double(fields[0], path));
        }
    } else {
        std::vector<double> times;
        times.reserve(lines.size());
        for (size_t i = 0; i < lines.size(); ++i) {
            auto fields = split_fields(lines[i]);
            if (fields.size() != 2) {
                throw std::runtime_error(path + ": line " + std::to_string(i + 1) +
                                         ": expected (time, value)");
            }
            times.push_back(parse_double(fields[0], path));
            samples.push_back(parse_double(fields[1], path));
        }
        if (times.size() >= 2) {
            const double span = times.back() - times.front();
            const double dt = span / static_cast<double>(times.size() - 1);
            if (!(dt > 0.0) || !std::isfinite(dt)) {
                throw std::runtime_error(path + ": time column is not increasing");
            }
            for (size_t i = 1; i < times.size(); ++i) {
                const double step = times[i] - times[i - 1];
                if (std::abs(step - dt) > 1e-6 * dt) {
                    throw std::runtime_error(path + ": inconsistent time spacing at row " +
                                             std::to_string(i + 1));
                }
            }
            tau0 = dt;
        }
    }

    if (samples.size() < 4) {
        throw std::runtime_error(path + ": need at least 4 samples, got " +
                                 std::to_string(samples.size()));
    }
    return make_series(std::move(samples), tau0, role,
                       std::filesystem::path(path).filename().string());
}

void write_series_one_column(const TimeSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "# tau0 " << format_double(series.tau0) << "\n";
    out << "# role " << to_string(series.role) << "\n";
    for (double v : series.samples) out << format_double(v) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

TimeSeries bin_timestamps(const std::vector<double>& timestamps, double tau0,
                          std::optional<double> span) {
    if (!(tau0 > 0.0) || !std::isfinite(tau0)) {
        throw std::invalid_argument("bin_timestamps: tau0 must be positive");
    }
    double t_max = 0.0;
    for (double t : timestamps) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("bin_timestamps: negative or non-finite timestamp");
        }
        t_max = std::max(t_max, t);
    }

    size_t bins = 0;
    if (span) {
        if (!(*span > 0.0)) throw std::invalid_argument("bin_timestamps: span must be positive");
        bins = static_cast<size_t>(std::ceil(*span / tau0));
    } else {
        if (timestamps.empty()) {
            throw std::invalid_argument("bin_timestamps: empty input and no span");
        }
        bins = static_cast<size_t>(std::floor(t_max / tau0)) + 1;
    }

    std::vector<double> counts(bins, 0.0);
    for (double t : timestamps) {
        size_t k = static_cast<size_t>(std::floor(t / tau0));
        if (k < bins) counts[k] += 1.0;
    }
    return make_series(std::move(counts), tau0, SeriesRole::rate, "binned");
}

TimeSeries integrate(const TimeSeries& series, bool force) {
    if (series.role == SeriesRole::cumulative && !force) {
        throw std::invalid_argument(
            "integrate: input is already cumulative (pass force to integrate anyway)");
    }
    std::vector<double> out(series.samples.size());
    double acc = 0.0;
    for (size_t k = 0; k < series.samples.size(); ++k) {
        acc += series.tau0 * series.samples[k];
        out[k] = acc;
    }
    TimeSeries result = series;
    result.samples = std::move(out);
    result.role = SeriesRole::cumulative;
    return result;
}

TimeSeries differentiate(const TimeSeries& series) {
    std::vector<double> out(series.samples.size());
    double prev = 0.0;
    for (size_t k = 0; k < series.samples.size(); ++k) {
        out[k] = (series.samples[k] - prev) / series.tau0;
        prev = series.samples[k];
    }
    TimeSeries result = series;
    result.samples = std::move(out);
    result.role = SeriesRole::rate;
    return result;
}

} // namespace mavar
