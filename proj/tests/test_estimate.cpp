#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <numbers>
#include <vector>

#include "mavar/engine.hpp"
#include "mavar/estimate.hpp"
#include "mavar/rng.hpp"
#include "mavar/synth.hpp"
#include "mavar/theory.hpp"

using namespace mavar;

namespace {

// Synthetic curve lying exactly on one or two log-log segments.
MavarCurve synthetic_curve(double mu1, double mu2, double break_tau, size_t n_samples = 131072) {
    MavarCurve curve;
    curve.n_samples = n_samples;
    curve.tau0 = 1.0;
    auto grid = make_tau_grid(n_samples);
    const double m1 = static_cast<double>(n_samples) - 2.0;
    const double level_at_break = -3.0; // log10 value at the breakpoint
    for (auto n : grid.n_values) {
        MavarPoint p;
        p.n = n;
        p.tau = static_cast<double>(n);
        p.m = static_cast<std::int64_t>(n_samples) - 3 * n + 1;
        p.conf = std::sqrt(static_cast<double>(p.m) / m1);
        const double lx = std::log10(p.tau) - std::log10(break_tau);
        const double ly = level_at_break + (p.tau <= break_tau ? mu1 : mu2) * lx;
        p.value = std::pow(10.0, ly);
        curve.points.push_back(p);
    }
    return curve;
}

GeneratorSpec spec_for(double hurst, std::size_t n, std::uint64_t seed,
                       AmplitudeMode mode = AmplitudeMode::rayleigh) {
    GeneratorSpec s;
    s.alpha = hurst_to_alpha(hurst);
    s.n = n;
    s.seed = seed;
    s.mode = mode;
    return s;
}

std::vector<double> gaussian_white(std::mt19937_64& gen, size_t n) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; i += 2) {
        const double u1 = uniform01_open_low(gen);
        const double u2 = uniform01(gen);
        const double r = std::sqrt(-2.0 * std::log(u1));
        v[i] = r * std::cos(2.0 * std::numbers::pi * u2);
        if (i + 1 < n) v[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    return v;
}

} // namespace

TEST_CASE("exact log-log line is recovered exactly") {
    auto curve = synthetic_curve(-2.5, -2.5, 1.0);
    auto fit = fit_slope(curve);
    CHECK(fit.mu == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(fit.residual_rms <= 1e-12);
    CHECK(fit.n_lo >= 5);
}

TEST_CASE("fit is invariant under a positive scale factor") {
    auto curve = synthetic_curve(-2.3, -2.3, 1.0);
    auto scaled = curve;
    for (auto& p : scaled.points) p.value *= 7.25;
    auto f1 = fit_slope(curve);
    auto f2 = fit_slope(scaled);
    CHECK(f2.mu == doctest::Approx(f1.mu).epsilon(1e-12));
    CHECK(f2.intercept > f1.intercept);
}

TEST_CASE("fit rejects degenerate input") {
    auto curve = synthetic_curve(-2.5, -2.5, 1.0);
    for (auto& p : curve.points) p.value = 0.0; // constant series curve
    CHECK_THROWS_WITH_AS(fit_slope(curve), doctest::Contains("non-positive"),
                         std::invalid_argument);

    auto few = synthetic_curve(-2.5, -2.5, 1.0, 131072);
    few.points.resize(6); // n = 1..6 -> fewer than 4 usable after n_lo = 5
    few.n_samples = 131072;
    CHECK_THROWS_AS(fit_slope(few), std::invalid_argument);
}

TEST_CASE("slope-to-H mapping") {
    SlopeFit fit;
    fit.mu = -3.0;
    auto e = hurst_from_slope(fit);
    CHECK(e.hurst == 0.5);
    CHECK(e.alpha == 0.0);
    CHECK_FALSE(e.lrd_valid); // boundary is not strictly LRD

    fit.mu = -2.824;
    e = hurst_from_slope(fit);
    CHECK(e.alpha == doctest::Approx(-0.176));
    CHECK(e.hurst == doctest::Approx(0.588));
    CHECK(e.gamma == doctest::Approx(0.176));
    CHECK(e.lrd_valid);

    fit.mu = -1.80;
    e = hurst_from_slope(fit);
    CHECK(e.alpha == doctest::Approx(-1.20));
    CHECK_FALSE(e.lrd_valid);
}

TEST_CASE("generated H=0.75 ensemble: slope within 0.04 of -2.5") {
    double sum = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        auto x = gen_lrd(spec_for(0.75, 131072, 400 + s), 1.0);
        sum += fit_slope(mavar_fast(x, make_tau_grid(x.size()))).mu;
    }
    CHECK(std::abs(sum / seeds - (-2.5)) < 0.04);
}

TEST_CASE("piecewise fit recovers an exact two-segment curve") {
    auto curve = synthetic_curve(-2.8, -1.8, 10.0);
    FitOptions options;
    options.tail_fraction = 0.3; // keep enough of the second regime
    auto seg = fit_segments(curve, 2, options);
    REQUIRE(seg.segments.size() == 2);
    CHECK(seg.segments[0].mu == doctest::Approx(-2.8).epsilon(1e-9));
    CHECK(seg.segments[1].mu == doctest::Approx(-1.8).epsilon(1e-9));
    REQUIRE(seg.breakpoints.size() == 1);
    // breakpoint within one grid step of tau = 10
    CHECK(seg.breakpoints[0] > 10.0 / 1.11);
    CHECK(seg.breakpoints[0] < 10.0 * 1.11);

    // k = 1 degenerates to fit_slope
    auto k1 = fit_segments(curve, 1, options);
    CHECK(k1.segments[0].mu == fit_slope(curve, options).mu);
}

TEST_CASE("segment residual is non-increasing in k") {
    std::mt19937_64 gen(3);
    auto x = gen_lrd(spec_for(0.8, 8192, 17), 1.0);
    auto curve = mavar_fast(x, make_tau_grid(8192));
    FitOptions options;
    options.tail_fraction = 0.33;
    const double r1 = fit_segments(curve, 1, options).total_residual;
    const double r2 = fit_segments(curve, 2, options).total_residual;
    const double r3 = fit_segments(curve, 3, options).total_residual;
    CHECK(r2 <= r1 + 1e-15);
    CHECK(r3 <= r2 + 1e-15);
}

TEST_CASE("variance-time plot on white noise") {
    std::mt19937_64 gen(21);
    auto y = make_series(gaussian_white(gen, 65536), 1.0, SeriesRole::rate);
    std::vector<std::int64_t> windows;
    for (std::int64_t w = 1; w <= 4096; w *= 2) windows.push_back(w);
    auto r = variance_time_plot(y, windows);
    CHECK(std::abs(r.estimate.mu - (-1.0)) < 0.1);
    CHECK(std::abs(r.estimate.hurst - 0.5) < 0.05);
    CHECK(r.curve.front().window == 1);

    // w = 1 equals the plain sample variance
    double mean = 0, var = 0;
    for (double v : y.samples) mean += v;
    mean /= static_cast<double>(y.size());
    for (double v : y.samples) var += (v - mean) * (v - mean);
    var /= static_cast<double>(y.size() - 1);
    CHECK(r.curve.front().variance == doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("variance-time plot on LRD noise: slope near 2H-2") {
    double sum = 0;
    const int seeds = 10;
    std::vector<std::int64_t> windows;
    for (std::int64_t w = 1; w <= 1024; w *= 2) windows.push_back(w);
    for (int s = 0; s < seeds; ++s) {
        auto x = gen_lrd(spec_for(0.8, 32768, 800 + s), 1.0);
        sum += variance_time_plot(x, windows).estimate.mu;
    }
    CHECK(std::abs(sum / seeds - (-0.4)) < 0.1);
}

TEST_CASE("variance-time plot errors") {
    auto y = make_series(std::vector<double>(64, 2.0), 1.0, SeriesRole::rate);
    CHECK_THROWS_AS(variance_time_plot(y, {1, 2}), std::invalid_argument); // constant
    std::mt19937_64 gen(1);
    auto z = make_series(gaussian_white(gen, 64), 1.0, SeriesRole::rate);
    CHECK_THROWS_AS(variance_time_plot(z, {32}), std::invalid_argument); // w > N/4
    auto c = make_series(gaussian_white(gen, 64), 1.0, SeriesRole::cumulative);
    CHECK_THROWS_AS(variance_time_plot(c, {2}), std::invalid_argument); // wrong role
}

TEST_CASE("periodogram on white noise and on LRD noise") {
    double white_sum = 0, lrd_sum = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        auto w = gen_lrd(spec_for(0.5, 16384, 900 + s), 1.0);
        white_sum += periodogram_estimate(w).estimate.alpha;
        auto x = gen_lrd(spec_for(0.8, 16384, 950 + s), 1.0);
        lrd_sum += periodogram_estimate(x).estimate.alpha;
    }
    CHECK(std::abs(white_sum / seeds) < 0.1);
    CHECK(std::abs(lrd_sum / seeds - (-0.6)) < 0.1);
}

TEST_CASE("periodogram peak lands on a pure sine's frequency") {
    const double tau0 = 0.01, fm = 12.5;
    std::vector<double> v(4096);
    for (size_t k = 0; k < v.size(); ++k) {
        v[k] = std::sin(2.0 * std::numbers::pi * fm * static_cast<double>(k) * tau0);
    }
    auto x = make_series(v, tau0, SeriesRole::rate);
    auto pg = periodogram_estimate(x);
    size_t peak = 0;
    for (size_t i = 0; i < pg.power.size(); ++i) {
        if (pg.power[i] > pg.power[peak]) peak = i;
    }
    CHECK(pg.freq[peak] == doctest::Approx(fm).epsilon(1e-3));
}

TEST_CASE("periodogram errors") {
    std::mt19937_64 gen(2);
    auto tiny = make_series(gaussian_white(gen, 32), 1.0, SeriesRole::rate);
    CHECK_THROWS_AS(periodogram_estimate(tiny), std::invalid_argument);
    auto zeros = make_series(std::vector<double>(128, 0.0), 1.0, SeriesRole::rate);
    CHECK_THROWS_AS(periodogram_estimate(zeros), std::invalid_argument);
}

TEST_CASE("haar diagram octave bounds") {
    std::mt19937_64 gen(4);
    auto x = make_series(gaussian_white(gen, 1024), 1.0, SeriesRole::rate);
    auto ld = haar_logscale_diagram(x);
    CHECK(ld.curve.front().octave == 1);
    CHECK(ld.curve.back().octave == 8); // floor(log2 1024) - 2
    CHECK(ld.curve.back().count == 4);
    CHECK_THROWS_AS(haar_logscale_diagram(x, 1, 9), std::invalid_argument);
}

TEST_CASE("haar diagram slopes: white flat, LRD near gamma") {
    double white_sum = 0, lrd_sum = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        auto w = gen_lrd(spec_for(0.5, 16384, 700 + s), 1.0);
        white_sum += haar_logscale_diagram(w).estimate.gamma;
        auto x = gen_lrd(spec_for(0.8, 16384, 750 + s), 1.0);
        lrd_sum += haar_logscale_diagram(x).estimate.gamma;
    }
    CHECK(std::abs(white_sum / seeds) < 0.15);
    CHECK(std::abs(lrd_sum / seeds - 0.6) < 0.15);
}

TEST_CASE("theory-curve loop recovers H = (1 - alpha)/2 without randomness") {
    for (double alpha : {0.0, -0.4, -1.0}) {
        PowerLawModel model;
        model.components = {{alpha, 1.0}};
        model.f_h = 0.5;
        MavarCurve curve;
        curve.n_samples = 131072;
        curve.tau0 = 1.0;
        const double m1 = static_cast<double>(curve.n_samples) - 2.0;
        for (double nf = 5; nf <= 4369; nf *= 1.2) {
            const std::int64_t n = static_cast<std::int64_t>(std::llround(nf));
            MavarPoint p;
            p.n = n;
            p.tau = static_cast<double>(n);
            p.m = static_cast<std::int64_t>(curve.n_samples) - 3 * n + 1;
            p.conf = std::sqrt(static_cast<double>(p.m) / m1);
            p.value = mavar_theoretical(model, p.tau, n);
            curve.points.push_back(p);
        }
        auto estimate = hurst_from_slope(fit_slope(curve));
        CHECK(std::abs(estimate.hurst - alpha_to_hurst(alpha)) < 0.02);
    }
}

TEST_CASE("estimate report JSON carries the contract fields") {
    auto curve = synthetic_curve(-2.5, -2.5, 1.0);
    auto fit = fit_slope(curve);
    auto seg = fit_segments(curve, 2);
    auto text = estimate_report_json(hurst_from_slope(fit), fit, &seg);
    CHECK(text.find("\"method\": \"mavar\"") != std::string::npos);
    CHECK(text.find("\"H\"") != std::string::npos);
    CHECK(text.find("\"lrd_valid\"") != std::string::npos);
    CHECK(text.find("\"segments\"") != std::string::npos);
    CHECK(text.find("\"fit_range_tau\"") != std::string::npos);
}
