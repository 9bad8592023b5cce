#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mavar/engine.hpp"
#include "mavar/series.hpp"

namespace mavar {

// Regression weights for log-log slope fits.
//  - uniform:    plain least squares.
//  - confidence: conf^2, i.e. proportional to the averaged-term count m.
//  - edf:        conf^2 / n, proportional to m/n, the number of effectively
//                independent averaging windows behind a point. The m-only
//                weighting treats the long-tau points as far more reliable
//                than they are (their m terms overlap heavily), which lets
//                tail noise and step contamination leak into the slope; m/n
//                tracks the real point variance and is the default.
enum class FitWeighting { uniform, confidence, edf };

const char* to_string(FitWeighting w);
FitWeighting fit_weighting_from_string(const std::string& text);

// Which slice of the curve a log-log fit uses. Points below n_lo are skipped
// because the filter response has not converged there; the tail is dropped
// because few terms are averaged at large n. tail_fraction t keeps
// n <= floor((N/3) * t): the 0.1 default cuts one decade below the hard
// N/3 cap, which keeps at least ~0.9 N averaged terms per point.
struct FitOptions {
    std::int64_t n_lo = 5;
    double tail_fraction = 0.1;
    FitWeighting weighting = FitWeighting::edf;
};

struct SlopeFit {
    double mu = 0.0;           // log-log slope
    double intercept = 0.0;    // log10 of the power-law amplitude
    double residual_rms = 0.0; // weighted rms of log10 residuals
    std::int64_t n_lo = 0;     // range actually used
    std::int64_t n_hi = 0;
    double tau_lo = 0.0;
    double tau_hi = 0.0;
    std::size_t points_used = 0;
    FitWeighting weighting = FitWeighting::edf;
};

// Weighted least squares of log10(value) on log10(tau). Throws if fewer than
// 4 points remain or any value in range is non-positive.
SlopeFit fit_slope(const MavarCurve& curve, const FitOptions& options = {});

enum class EstimateMethod { mavar, variance_time, periodogram, haar_ld };

const char* to_string(EstimateMethod method);
EstimateMethod estimate_method_from_string(const std::string& text);

// mu is the fitted slope in each method's own diagram; alpha/gamma/hurst are
// the mapped spectral exponents of the analyzed sequence. lrd_valid flags
// whether the slope fell in the strict long-range-dependence window; outside
// it the estimate is still reported (fractional-motion regimes are real).
struct HurstEstimate {
    double hurst = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    double mu = 0.0;
    bool lrd_valid = false;
    EstimateMethod method = EstimateMethod::mavar;
};

// mu -> (H, alpha, gamma): H = mu/2 + 2, alpha = -3 - mu, gamma = 2H - 1.
// Valid strictly-LRD window is -3 < mu < -2.
HurstEstimate hurst_from_slope(const SlopeFit& fit);

struct SegmentedFit {
    std::vector<SlopeFit> segments;    // ordered by tau
    std::vector<double> breakpoints;   // tau between consecutive segments
    double total_residual = 0.0;       // summed weighted squared residuals
};

// Splits the fit range into k contiguous segments (k in {1, 2, 3}) by
// exhaustive search over grid breakpoints, minimizing total weighted squared
// residual; each segment keeps at least 4 points. k = 1 reduces to fit_slope.
SegmentedFit fit_segments(const MavarCurve& curve, int k = 2, const FitOptions& options = {});

struct VtpPoint {
    std::int64_t window = 0;
    double variance = 0.0;
};

struct VtpResult {
    std::vector<VtpPoint> curve;
    HurstEstimate estimate;
};

// Variance of nonoverlapping block means vs block width, log-log slope s;
// H = 1 + s/2. Input must be rate-like; windows may not exceed N/4.
VtpResult variance_time_plot(const TimeSeries& y, const std::vector<std::int64_t>& windows);

struct PeriodogramResult {
    std::vector<double> freq;   // hertz, k/(P*tau0)
    std::vector<double> power;  // one-sided, 2*tau0/P * |X_k|^2
    HurstEstimate estimate;
    double fit_f_lo = 0.0;
    double fit_f_hi = 0.0;
};

// Periodogram of the mean-removed leading 2^k samples; the log-log slope over
// the fit band (given as fractions of Nyquist) estimates alpha directly, and
// H = (1 - alpha)/2. Needs N >= 64.
PeriodogramResult periodogram_estimate(const TimeSeries& x,
                                       std::pair<double, double> fit_band = {0.01, 0.25});

struct LdPoint {
    int octave = 0;
    std::int64_t count = 0;  // detail coefficients at this octave
    double y = 0.0;          // log2 mean squared detail, bias-corrected
};

struct LdResult {
    std::vector<LdPoint> curve;
    HurstEstimate estimate;
};

// Log-scale diagram with the Haar wavelet: per octave j the log2 mean energy
// of detail coefficients, regressed on j with weights proportional to the
// coefficient count. The slope estimates gamma; H = (gamma + 1)/2.
// octave_hi = 0 selects the maximum usable octave, floor(log2 N) - 2
// (at least 4 coefficients per octave).
LdResult haar_logscale_diagram(const TimeSeries& x, int octave_lo = 1, int octave_hi = 0);

// Estimate report JSON: {method, H, alpha, gamma, mu, lrd_valid,
// fit_range_tau, residual_rms, segments[...]}.
std::string estimate_report_json(const HurstEstimate& estimate, const SlopeFit& fit,
                                 const SegmentedFit* segmented = nullptr);

} // namespace mavar
