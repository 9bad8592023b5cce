#include "mavar/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "mavar/fft.hpp"

namespace mavar {

const char* to_string(FitWeighting w) {
    switch (w) {
    case FitWeighting::uniform: return "uniform";
    case FitWeighting::confidence: return "confidence";
    case FitWeighting::edf: return "edf";
    }
    return "?";
}

FitWeighting fit_weighting_from_string(const std::string& text) {
    if (text == "uniform") return FitWeighting::uniform;
    if (text == "confidence") return FitWeighting::confidence;
    if (text == "edf") return FitWeighting::edf;
    throw std::invalid_argument("unknown fit weighting: '" + text + "'");
}

const char* to_string(EstimateMethod method) {
    switch (method) {
    case EstimateMethod::mavar: return "mavar";
    case EstimateMethod::variance_time: return "vtp";
    case EstimateMethod::periodogram: return "periodogram";
    case EstimateMethod::haar_ld: return "haarld";
    }
    return "?";
}

EstimateMethod estimate_method_from_string(const std::string& text) {
    if (text == "mavar") return EstimateMethod::mavar;
    if (text == "vtp" || text == "variance-time") return EstimateMethod::variance_time;
    if (text == "periodogram") return EstimateMethod::periodogram;
    if (text == "haarld" || text == "haar-ld") return EstimateMethod::haar_ld;
    throw std::invalid_argument("unknown estimation method: '" + text + "'");
}

namespace {

struct WlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rss = 0.0;  // weighted sum of squared residuals
    double rms = 0.0;  // sqrt(rss / sum w)
};

WlsFit weighted_least_squares(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w) {
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double xbar = sx / sw;
    const double ybar = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - xbar;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * (y[i] - ybar);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("regression: degenerate abscissa");
    WlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.rss += w[i] * r * r;
    }
    fit.rms = std::sqrt(fit.rss / sw);
    return fit;
}

double point_weight(const MavarPoint& p, FitWeighting weighting) {
    switch (weighting) {
    case FitWeighting::uniform: return 1.0;
    case FitWeighting::confidence: return p.conf * p.conf;
    case FitWeighting::edf: return p.conf * p.conf / static_cast<double>(p.n);
    }
    return 1.0;
}

// Indices of curve points admitted by the fit window.
std::vector<std::size_t> fit_window(const MavarCurve& curve, const FitOptions& options) {
    if (!(options.tail_fraction > 0.0) || options.tail_fraction > 1.0) {
        throw std::invalid_argument("fit: tail_fraction must lie in (0, 1]");
    }
    const std::int64_t n_hi = static_cast<std::int64_t>(
        static_cast<double>(curve.n_samples) / 3.0 * options.tail_fraction);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        if (p.n >= options.n_lo && p.n <= n_hi) idx.push_back(i);
    }
    return idx;
}

SlopeFit fit_on_indices(const MavarCurve& curve, const std::vector<std::size_t>& idx,
                        const FitOptions& options) {
    if (idx.size() < 4) {
        throw std::invalid_argument("fit: fewer than 4 usable curve points");
    }
    std::vector<double> x, y, w;
    x.reserve(idx.size());
    y.reserve(idx.size());
    w.reserve(idx.size());
    for (std::size_t i : idx) {
        const auto& p = curve.points[i];
        if (!(p.value > 0.0)) {
            throw std::invalid_argument("fit: non-positive curve value at n = " +
                                        std::to_string(p.n) + " (degenerate series?)");
        }
        x.push_back(std::log10(p.tau));
        y.push_back(std::log10(p.value));
        w.push_back(point_weight(p, options.weighting));
    }
    WlsFit wls = weighted_least_squares(x, y, w);

    SlopeFit fit;
    fit.mu = wls.slope;
    fit.intercept = wls.intercept;
    fit.residual_rms = wls.rms;
    fit.n_lo = curve.points[idx.front()].n;
    fit.n_hi = curve.points[idx.back()].n;
    fit.tau_lo = curve.points[idx.front()].tau;
    fit.tau_hi = curve.points[idx.back()].tau;
    fit.points_used = idx.size();
    fit.weighting = options.weighting;
    return fit;
}

double fit_rss(const MavarCurve& curve, const std::vector<std::size_t>& idx,
               const FitOptions& options) {
    std::vector<double> x, y, w;
    for (std::size_t i : idx) {
        const auto& p = curve.points[i];
        x.push_back(std::log10(p.tau));
        y.push_back(std::log10(p.value));
        w.push_back(point_weight(p, options.weighting));
    }
    return weighted_least_squares(x, y, w).rss;
}

} // namespace

SlopeFit fit_slope(const MavarCurve& curve, const FitOptions& options) {
    return fit_on_indices(curve, fit_window(curve, options), options);
}

HurstEstimate hurst_from_slope(const SlopeFit& fit) {
    HurstEstimate est;
    est.method = EstimateMethod::mavar;
    est.mu = fit.mu;
    est.hurst = fit.mu / 2.0 + 2.0;
    est.alpha = -3.0 - fit.mu;
    est.gamma = 2.0 * est.hurst - 1.0;
    est.lrd_valid = fit.mu > -3.0 && fit.mu < -2.0;
    return est;
}

SegmentedFit fit_segments(const MavarCurve& curve, int k, const FitOptions& options) {
    if (k < 1 || k > 3) throw std::invalid_argument("fit_segments: k must be 1, 2 or 3");
    auto idx = fit_window(curve, options);
    if (idx.size() < 4 * static_cast<std::size_t>(k)) {
        throw std::invalid_argument("fit_segments: need at least 4 points per segment");
    }
    // positivity is checked once up front so the breakpoint scan stays cheap
    for (std::size_t i : idx) {
        if (!(curve.points[i].value > 0.0)) {
            throw std::invalid_argument("fit_segments: non-positive curve value at n = " +
                                        std::to_string(curve.points[i].n));
        }
    }

    auto slice = [&](std::size_t lo, std::size_t hi) { // [lo, hi) into idx
        return std::vector<std::size_t>(idx.begin() + lo, idx.begin() + hi);
    };
    auto break_tau = [&](std::size_t last_left, std::size_t first_right) {
        return std::sqrt(curve.points[idx[last_left]].tau * curve.points[idx[first_right]].tau);
    };

    SegmentedFit out;
    const std::size_t total = idx.size();

    if (k == 1) {
        out.segments.push_back(fit_on_indices(curve, idx, options));
        out.total_residual = fit_rss(curve, idx, options);
        return out;
    }

    double best = std::numeric_limits<double>::infinity();
    if (k == 2) {
        std::size_t best_split = 0;
        for (std::size_t s = 4; s + 4 <= total; ++s) {
            const double rss = fit_rss(curve, slice(0, s), options) +
                               fit_rss(curve, slice(s, total), options);
            if (rss < best) {
                best = rss;
                best_split = s;
            }
        }
        out.segments.push_back(fit_on_indices(curve, slice(0, best_split), options));
        out.segments.push_back(fit_on_indices(curve, slice(best_split, total), options));
        out.breakpoints.push_back(break_tau(best_split - 1, best_split));
    } else {
        std::size_t best_s1 = 0, best_s2 = 0;
        for (std::size_t s1 = 4; s1 + 8 <= total; ++s1) {
            const double rss1 = fit_rss(curve, slice(0, s1), options);
            for (std::size_t s2 = s1 + 4; s2 + 4 <= total; ++s2) {
                const double rss = rss1 + fit_rss(curve, slice(s1, s2), options) +
                                   fit_rss(curve, slice(s2, total), options);
                if (rss < best) {
                    best = rss;
                    best_s1 = s1;
                    best_s2 = s2;
                }
            }
        }
        out.segments.push_back(fit_on_indices(curve, slice(0, best_s1), options));
        out.segments.push_back(fit_on_indices(curve, slice(best_s1, best_s2), options));
        out.segments.push_back(fit_on_indices(curve, slice(best_s2, total), options));
        out.breakpoints.push_back(break_tau(best_s1 - 1, best_s1));
        out.breakpoints.push_back(break_tau(best_s2 - 1, best_s2));
    }
    out.total_residual = best;
    return out;
}

VtpResult variance_time_plot(const TimeSeries& y, const std::vector<std::int64_t>& windows) {
    if (y.role != SeriesRole::rate) {
        throw std::invalid_argument("variance_time_plot: input must be rate-like");
    }
    const std::int64_t n = static_cast<std::int64_t>(y.samples.size());
    if (windows.empty()) throw std::invalid_argument("variance_time_plot: no windows");

    VtpResult out;
    std::vector<double> lx, ly, lw;
    for (std::int64_t w : windows) {
        if (w < 1 || w > n / 4) {
            throw std::invalid_argument("variance_time_plot: window " + std::to_string(w) +
                                        " outside [1, N/4]");
        }
        const std::int64_t blocks = n / w;
        std::vector<double> means(static_cast<std::size_t>(blocks));
        for (std::int64_t b = 0; b < blocks; ++b) {
            double s = 0.0;
            for (std::int64_t i = b * w; i < (b + 1) * w; ++i) {
                s += y.samples[static_cast<std::size_t>(i)];
            }
            means[static_cast<std::size_t>(b)] = s / static_cast<double>(w);
        }
        double mean = 0.0;
        for (double v : means) mean += v;
        mean /= static_cast<double>(blocks);
        double var = 0.0;
        for (double v : means) var += (v - mean) * (v - mean);
        var /= static_cast<double>(blocks - 1);
        if (!(var > 0.0)) {
            throw std::invalid_argument("variance_time_plot: zero variance (constant series)");
        }
        out.curve.push_back({w, var});
        lx.push_back(std::log10(static_cast<double>(w)));
        ly.push_back(std::log10(var));
        lw.push_back(1.0);
    }
    if (lx.size() < 2) throw std::invalid_argument("variance_time_plot: need >= 2 windows");

    WlsFit fit = weighted_least_squares(lx, ly, lw);
    HurstEstimate& est = out.estimate;
    est.method = EstimateMethod::variance_time;
    est.mu = fit.slope;                     // sigma^2(w) ~ w^{2H-2}
    est.hurst = 1.0 + fit.slope / 2.0;
    est.gamma = 2.0 * est.hurst - 1.0;
    est.alpha = 1.0 - 2.0 * est.hurst;
    est.lrd_valid = fit.slope > -1.0 && fit.slope < 0.0;
    return out;
}

PeriodogramResult periodogram_estimate(const TimeSeries& x, std::pair<double, double> fit_band) {
    const std::size_t n = x.samples.size();
    if (n < 64) throw std::invalid_argument("periodogram_estimate: need at least 64 samples");
    if (!(fit_band.first > 0.0) || !(fit_band.second <= 1.0) ||
        !(fit_band.first < fit_band.second)) {
        throw std::invalid_argument("periodogram_estimate: fit band must satisfy 0 < lo < hi <= 1");
    }

    // leading power-of-two slice keeps the transform simple
    std::size_t p = 1;
    while (p * 2 <= n) p *= 2;

    double mean = 0.0;
    for (std::size_t i = 0; i < p; ++i) mean += x.samples[i];
    mean /= static_cast<double>(p);

    std::vector<std::complex<double>> buf(p);
    for (std::size_t i = 0; i < p; ++i) buf[i] = {x.samples[i] - mean, 0.0};
    fft_radix2(buf, -1);

    PeriodogramResult out;
    const double df = 1.0 / (static_cast<double>(p) * x.tau0);
    out.freq.reserve(p / 2);
    out.power.reserve(p / 2);
    double total_power = 0.0;
    for (std::size_t k = 1; k <= p / 2; ++k) {
        const double mag2 = std::norm(buf[k]);
        const double pw = 2.0 * x.tau0 / static_cast<double>(p) * mag2;
        out.freq.push_back(static_cast<double>(k) * df);
        out.power.push_back(pw);
        total_power += pw;
    }
    if (!(total_power > 0.0)) {
        throw std::invalid_argument("periodogram_estimate: degenerate (all-zero) input");
    }

    const double f_nyquist = 0.5 / x.tau0;
    out.fit_f_lo = fit_band.first * f_nyquist;
    out.fit_f_hi = fit_band.second * f_nyquist;

    std::vector<double> lx, ly, lw;
    for (std::size_t i = 0; i < out.freq.size(); ++i) {
        if (out.freq[i] < out.fit_f_lo || out.freq[i] > out.fit_f_hi) continue;
        if (!(out.power[i] > 0.0)) continue;
        lx.push_back(std::log10(out.freq[i]));
        ly.push_back(std::log10(out.power[i]));
        lw.push_back(1.0);
    }
    if (lx.size() < 8) {
        throw std::invalid_argument("periodogram_estimate: too few bins inside the fit band");
    }
    WlsFit fit = weighted_least_squares(lx, ly, lw);

    HurstEstimate& est = out.estimate;
    est.method = EstimateMethod::periodogram;
    est.mu = fit.slope;
    est.alpha = fit.slope;               // S_x(f) ~ f^alpha over the band
    est.hurst = (1.0 - est.alpha) / 2.0;
    est.gamma = -est.alpha;
    est.lrd_valid = est.alpha > -1.0 && est.alpha < 0.0;
    return out;
}

namespace {

double digamma(double x) {
    double r = 0.0;
    while (x < 6.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    return r + std::log(x) - 0.5 / x -
           f * (1.0 / 12.0 - f * (1.0 / 120.0 - f * (1.0 / 252.0 - f / 240.0)));
}

// E[log2(chi2_m / m)]: small-sample bias of log2 of an averaged energy.
double log2_energy_bias(std::int64_t count) {
    const double half = static_cast<double>(count) / 2.0;
    return (digamma(half) - std::log(half)) / std::numbers::ln2;
}

} // namespace

LdResult haar_logscale_diagram(const TimeSeries& x, int octave_lo, int octave_hi) {
    const std::size_t n = x.samples.size();
    if (n < 8) throw std::invalid_argument("haar_logscale_diagram: series too short");
    int max_octave = 0;
    for (std::size_t len = n; len >= 8; len /= 2) ++max_octave; // floor(log2 N) - 2
    if (octave_hi == 0) octave_hi = max_octave;
    if (octave_lo < 1 || octave_hi < octave_lo || octave_hi > max_octave) {
        throw std::invalid_argument("haar_logscale_diagram: octave range must lie in [1, " +
                                    std::to_string(max_octave) + "]");
    }

    LdResult out;
    std::vector<double> approx(x.samples);
    std::vector<double> lx, ly, lw;
    for (int j = 1; j <= octave_hi; ++j) {
        const std::size_t half = approx.size() / 2;
        double energy = 0.0;
        for (std::size_t k = 0; k < half; ++k) {
            const double d = (approx[2 * k] - approx[2 * k + 1]) * std::numbers::sqrt2 / 2.0;
            energy += d * d;
            approx[k] = (approx[2 * k] + approx[2 * k + 1]) * std::numbers::sqrt2 / 2.0;
        }
        approx.resize(half);
        if (j < octave_lo) continue;
        if (!(energy > 0.0)) {
            throw std::invalid_argument("haar_logscale_diagram: zero detail energy at octave " +
                                        std::to_string(j) + " (degenerate series)");
        }
        const double mean_energy = energy / static_cast<double>(half);
        LdPoint point;
        point.octave = j;
        point.count = static_cast<std::int64_t>(half);
        point.y = std::log2(mean_energy) - log2_energy_bias(point.count);
        out.curve.push_back(point);
        lx.push_back(static_cast<double>(j));
        ly.push_back(point.y);
        lw.push_back(static_cast<double>(half));
    }
    if (lx.size() < 2) throw std::invalid_argument("haar_logscale_diagram: need >= 2 octaves");

    WlsFit fit = weighted_least_squares(lx, ly, lw);
    HurstEstimate& est = out.estimate;
    est.method = EstimateMethod::haar_ld;
    est.mu = fit.slope;                  // detail energy ~ 2^{j gamma}
    est.gamma = fit.slope;
    est.hurst = (est.gamma + 1.0) / 2.0;
    est.alpha = -est.gamma;
    est.lrd_valid = est.gamma > 0.0 && est.gamma < 1.0;
    return out;
}

std::string estimate_report_json(const HurstEstimate& estimate, const SlopeFit& fit,
                                 const SegmentedFit* segmented) {
    nlohmann::json j;
    j["method"] = to_string(estimate.method);
    j["H"] = estimate.hurst;
    j["alpha"] = estimate.alpha;
    j["gamma"] = estimate.gamma;
    j["mu"] = estimate.mu;
    j["lrd_valid"] = estimate.lrd_valid;
    j["fit_range_tau"] = {fit.tau_lo, fit.tau_hi};
    j["residual_rms"] = fit.residual_rms;
    j["weighting"] = to_string(fit.weighting);
    if (segmented) {
        nlohmann::json segs = nlohmann::json::array();
        for (const auto& s : segmented->segments) {
            HurstEstimate se = hurst_from_slope(s);
            segs.push_back({{"mu", s.mu},
                            {"alpha", se.alpha},
                            {"H", se.hurst},
                            {"lrd_valid", se.lrd_valid},
                            {"tau_range", {s.tau_lo, s.tau_hi}},
                            {"residual_rms", s.residual_rms}});
        }
        j["segments"] = std::move(segs);
        j["breakpoints_tau"] = segmented->breakpoints;
        j["total_residual"] = segmented->total_residual;
    }
    return j.dump(2);
}

} // namespace mavar
