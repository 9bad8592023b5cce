#include "mavar/engine.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mavar/parallel.hpp"
#include "mavar/textio.hpp"

namespace mavar {

TauGrid make_tau_grid(std::size_t n_samples, double ratio, std::optional<std::int64_t> n_max) {
    if (n_samples < 4) {
        throw std::invalid_argument("make_tau_grid: need at least 4 samples");
    }
    if (!(ratio > 1.0) || !(ratio <= 2.0)) {
        throw std::invalid_argument("make_tau_grid: ratio must lie in (1, 2]");
    }
    std::int64_t cap = static_cast<std::int64_t>(n_samples / 3);
    if (n_max) {
        if (*n_max < 1 || *n_max > cap) {
            throw std::invalid_argument("make_tau_grid: n_max must lie in [1, floor(N/3)]");
        }
        cap = *n_max;
    }

    TauGrid grid;
    grid.ratio = ratio;
    for (int j = 0;; ++j) {
        const std::int64_t n = std::llround(std::pow(ratio, j));
        if (n > cap) break;
        if (grid.n_values.empty() || n > grid.n_values.back()) grid.n_values.push_back(n);
    }
    return grid;
}

namespace {

void check_n_range(std::size_t n_samples, std::int64_t n) {
    const std::int64_t cap = static_cast<std::int64_t>(n_samples / 3);
    if (n < 1 || n > cap) {
        throw std::invalid_argument("mavar: n = " + std::to_string(n) +
                                    " outside [1, floor(N/3)] for N = " +
                                    std::to_string(n_samples));
    }
}

// Shared by the naive and fast paths; both are the same sum reassociated.
double mavar_prefactor(std::int64_t n, double tau0, std::int64_t m) {
    const long double nd = static_cast<long double>(n);
    return static_cast<double>(1.0L /
        (2.0L * nd * nd * nd * nd * static_cast<long double>(tau0) *
         static_cast<long double>(tau0) * static_cast<long double>(m)));
}

double mavar_point(const std::vector<double>& x, std::int64_t n, double tau0) {
    const std::int64_t len = static_cast<std::int64_t>(x.size());
    const std::int64_t m = len - 3 * n + 1;

    auto second_diff = [&](std::int64_t i) -> long double {
        return static_cast<long double>(x[static_cast<std::size_t>(i + 2 * n)]) -
               2.0L * static_cast<long double>(x[static_cast<std::size_t>(i + n)]) +
               static_cast<long double>(x[static_cast<std::size_t>(i)]);
    };

    long double window = 0.0L;
    for (std::int64_t i = 0; i < n; ++i) window += second_diff(i);

    long double acc = window * window;
    for (std::int64_t j = 1; j < m; ++j) {
        window += second_diff(j - 1 + n) - second_diff(j - 1);
        acc += window * window;
    }
    return static_cast<double>(acc) * mavar_prefactor(n, tau0, m);
}

} // namespace

double mavar_naive(const TimeSeries& x, std::int64_t n) {
    const std::size_t len = x.samples.size();
    if (len < 4) throw std::invalid_argument("mavar_naive: need at least 4 samples");
    check_n_range(len, n);

    const std::int64_t m = static_cast<std::int64_t>(len) - 3 * n + 1;
    long double acc = 0.0L;
    for (std::int64_t j = 0; j < m; ++j) {
        long double inner = 0.0L;
        for (std::int64_t i = j; i < j + n; ++i) {
            inner += static_cast<long double>(x.samples[static_cast<std::size_t>(i + 2 * n)]) -
                     2.0L * static_cast<long double>(x.samples[static_cast<std::size_t>(i + n)]) +
                     static_cast<long double>(x.samples[static_cast<std::size_t>(i)]);
        }
        acc += inner * inner;
    }
    return static_cast<double>(acc) * mavar_prefactor(n, x.tau0, m);
}

MavarCurve mavar_fast(const TimeSeries& x, const TauGrid& grid) {
    const std::size_t len = x.samples.size();
    if (len < 4) throw std::invalid_argument("mavar_fast: need at least 4 samples");
    for (std::size_t i = 0; i < grid.n_values.size(); ++i) {
        check_n_range(len, grid.n_values[i]);
        if (i > 0 && grid.n_values[i] <= grid.n_values[i - 1]) {
            throw std::invalid_argument("mavar_fast: grid must be strictly increasing");
        }
    }

    MavarCurve curve;
    curve.n_samples = len;
    curve.tau0 = x.tau0;
    curve.role_used = x.role;
    curve.source_label = x.label;
    curve.points.resize(grid.n_values.size());

    const double m1 = static_cast<double>(len) - 2.0; // averaged terms at n = 1
    parallel_for(grid.n_values.size(), [&](std::size_t idx) {
        const std::int64_t n = grid.n_values[idx];
        MavarPoint& p = curve.points[idx];
        p.n = n;
        p.tau = static_cast<double>(n) * x.tau0;
        p.m = static_cast<std::int64_t>(len) - 3 * n + 1;
        p.conf = std::sqrt(static_cast<double>(p.m) / m1);
        p.value = mavar_point(x.samples, n, x.tau0);
    });
    return curve;
}

void write_curve_csv(const MavarCurve& curve, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "n,tau,mavar,m,conf\n";
    for (const auto& p : curve.points) {
        out << p.n << ',' << format_double(p.tau) << ',' << format_double(p.value) << ',' << p.m
            << ',' << format_double(p.conf) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

MavarCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty curve file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "n,tau,mavar,m,conf") {
        throw std::runtime_error(path + ": unexpected curve header '" + line + "'");
    }

    MavarCurve curve;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_on(line, ',');
        if (fields.size() != 5) throw std::runtime_error(path + ": malformed curve row");
        MavarPoint p;
        p.n = static_cast<std::int64_t>(parse_double(fields[0], path));
        p.tau = parse_double(fields[1], path);
        p.value = parse_double(fields[2], path);
        p.m = static_cast<std::int64_t>(parse_double(fields[3], path));
        p.conf = parse_double(fields[4], path);
        curve.points.push_back(p);
    }
    if (!curve.points.empty()) {
        const auto& p = curve.points.front();
        curve.n_samples = static_cast<std::size_t>(p.m + 3 * p.n - 1);
        curve.tau0 = p.tau / static_cast<double>(p.n);
    }
    return curve;
}

} // namespace mavar
