#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mavar {

// A series of packet/bit counts per bin (or any rate-like signal) vs the
// cumulative count. The tag is advisory: the variance engine accepts either
// and records which one it was given.
enum class SeriesRole { rate, cumulative };

const char* to_string(SeriesRole role);
SeriesRole series_role_from_string(const std::string& text);

// Evenly spaced samples with sampling period tau0 (seconds).
struct TimeSeries {
    std::vector<double> samples;
    double tau0 = 1.0;
    SeriesRole role = SeriesRole::rate;
    std::string label;

    std::size_t size() const { return samples.size(); }
    double duration() const { return tau0 * static_cast<double>(samples.size()); }
};

// Validates tau0 > 0 and all samples finite.
TimeSeries make_series(std::vector<double> samples, double tau0, SeriesRole role,
                       std::string label = {});

enum class SeriesFormat { one_column, two_column };

// One-column: one value per line, '#' comments ignored, tau0 from the caller.
// Two-column: (time, value) rows, comma- or whitespace-separated; tau0 is
// inferred from the row spacing, which must be constant to 1e-6 relative.
// Requires at least 4 samples.
TimeSeries load_series(const std::string& path, SeriesFormat format, double tau0,
                       SeriesRole role);

// One-column writer; full precision, so write/load/write is byte-identical.
void write_series_one_column(const TimeSeries& series, const std::string& path);

// Counts events into half-open bins [k*tau0, (k+1)*tau0). Bin count is
// ceil(span/tau0) when span is given, otherwise just enough to hold the
// latest timestamp. Unsorted input is fine; events past the span are dropped.
TimeSeries bin_timestamps(const std::vector<double>& timestamps, double tau0,
                          std::optional<double> span = std::nullopt);

// Running sum x_k = x_{k-1} + tau0*y_k (x_0 = tau0*y_0): rate -> cumulative.
// Refuses a cumulative input unless force is set, as that usually means the
// series would be integrated twice.
TimeSeries integrate(const TimeSeries& series, bool force = false);

// First difference divided by tau0: cumulative -> rate. Inverse of integrate.
TimeSeries differentiate(const TimeSeries& series);

} // namespace mavar
