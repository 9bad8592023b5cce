// Acceptance suite: one pass/fail line per criterion, non-zero exit if any
// criterion fails. Heavier ensembles reuse the experiment harness, so these
// runs double as end-to-end checks of the reporting pipeline.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mavar/engine.hpp"
#include "mavar/estimate.hpp"
#include "mavar/experiment.hpp"
#include "mavar/rng.hpp"
#include "mavar/series.hpp"
#include "mavar/synth.hpp"
#include "mavar/theory.hpp"

using namespace mavar;

namespace {

int g_failures = 0;

class Criterion {
public:
    Criterion(int id, std::string title)
        : id_(id), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& detail) {
        if (!ok) {
            failed_ = true;
            details_.push_back(detail);
        }
    }

    ~Criterion() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::printf("[%s] C%d %s (%.1f s)\n", failed_ ? "FAIL" : "PASS", id_, title_.c_str(),
                    secs);
        for (const auto& d : details_) std::printf("       %s\n", d.c_str());
        if (failed_) ++g_failures;
        std::fflush(stdout);
    }

private:
    int id_;
    std::string title_;
    std::chrono::steady_clock::time_point start_;
    bool failed_ = false;
    std::vector<std::string> details_;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

GeneratorSpec spec_for(double alpha, std::size_t n, std::uint64_t seed, AmplitudeMode mode) {
    GeneratorSpec s;
    s.alpha = alpha;
    s.n = n;
    s.seed = seed;
    s.mode = mode;
    s.normalize = true;
    return s;
}

// ---------------------------------------------------------------------------

void criterion1_oracle_equivalence() {
    Criterion c(1, "fast estimator equals the naive oracle (50 series, N <= 512, all n)");
    std::mt19937_64 gen(101);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n_samples = 24 + gen() % 489;
        std::vector<double> v(n_samples);
        for (auto& s : v) s = uniform01(gen) * 2.0 - 1.0;
        auto x = make_series(std::move(v), 0.008, SeriesRole::rate);
        TauGrid grid;
        for (std::int64_t k = 1; k <= static_cast<std::int64_t>(n_samples / 3); ++k) {
            grid.n_values.push_back(k);
        }
        auto curve = mavar_fast(x, grid);
        for (std::size_t i = 0; i < grid.n_values.size(); ++i) {
            const double naive = mavar_naive(x, grid.n_values[i]);
            const double rel =
                std::abs(curve.points[i].value - naive) / std::max(std::abs(naive), 1e-300);
            worst = std::max(worst, rel);
        }
    }
    c.check(worst <= 1e-9, fmt("worst relative deviation %.3e > 1e-9", worst));
}

void criterion2_exact_closed_forms() {
    Criterion c(2, "quadratic drift gives exactly 2 C^2 tau^2 (20 dyadic draws)");
    std::mt19937_64 gen(202);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        // dyadic draws keep the samples exactly representable; see notes in
        // the engine tests for why arbitrary reals cannot reach 1e-10 here
        const double tau0 = std::ldexp(1.0, -static_cast<int>(gen() % 8));
        const double a = static_cast<double>(gen() % 64) * 0.125;
        const double b = static_cast<double>(gen() % 32) * 0.25;
        const double cq = (1.0 + static_cast<double>(gen() % 31)) * 0.125;
        const std::size_t n_samples = 128u << (gen() % 5); // 128 .. 2048
        std::vector<double> v(n_samples);
        for (std::size_t k = 0; k < n_samples; ++k) {
            const double t = static_cast<double>(k) * tau0;
            v[k] = a + b * t + cq * t * t;
        }
        auto x = make_series(std::move(v), tau0, SeriesRole::rate);
        auto curve = mavar_fast(x, make_tau_grid(n_samples));
        for (const auto& p : curve.points) {
            const double expected = 2.0 * cq * cq * p.tau * p.tau;
            worst = std::max(worst, std::abs(p.value - expected) / expected);
        }
    }
    c.check(worst <= 1e-10, fmt("worst relative deviation %.3e > 1e-10", worst));
}

void criterion3_sine_response() {
    Criterion c(3, "engine matches the closed-form sine response (N = 65536)");
    const std::size_t n_samples = 65536;
    const double tau0 = 0.01;
    const double fm = 1.0 / (2.0 * std::numbers::pi); // unit slope-to-sample factor
    const double amplitude = 1.0;
    std::vector<double> v(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        v[k] = amplitude * std::sin(2.0 * std::numbers::pi * fm * static_cast<double>(k) * tau0);
    }
    auto x = make_series(std::move(v), tau0, SeriesRole::rate);
    auto grid = make_tau_grid(n_samples);
    auto curve = mavar_fast(x, grid);

    // first three envelope maxima, tau = (k + 1/2)/fm
    for (int k = 0; k < 3; ++k) {
        const double tau_peak = (k + 0.5) / fm;
        const MavarPoint* nearest = nullptr;
        double best = 1e300;
        for (const auto& p : curve.points) {
            if (p.n <= 4) continue;
            if (std::abs(p.tau - tau_peak) < best) {
                best = std::abs(p.tau - tau_peak);
                nearest = &p;
            }
        }
        const double closed = mavar_sine(amplitude, fm, nearest->tau);
        const double rel = std::abs(nearest->value / closed - 1.0);
        c.check(rel <= 0.10,
                fmt("envelope maximum %d: engine/closed-form off by %.3f", k, rel));
    }

    // zeros at tau = k/fm within one grid step
    for (int k = 1; k <= 3; ++k) {
        const double tau_zero = k / fm;
        std::size_t zero_idx = 0, nearest_idx = 0;
        double zero_best = 1e300, near_best = 1e300;
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            const auto& p = curve.points[i];
            if (std::abs(p.tau - tau_zero) < near_best) {
                near_best = std::abs(p.tau - tau_zero);
                nearest_idx = i;
            }
            if (p.tau < 0.7 * tau_zero || p.tau > 1.3 * tau_zero) continue;
            if (p.value < zero_best) {
                zero_best = p.value;
                zero_idx = i;
            }
        }
        const long gap = std::labs(static_cast<long>(zero_idx) - static_cast<long>(nearest_idx));
        c.check(gap <= 1, fmt("zero %d: minimum sits %d grid steps from k/fm", k,
                              static_cast<double>(gap)));
    }
}

void criterion4_accuracy() {
    Criterion c(4, "accuracy at N = 131072: |mean err| <= 0.02 and std <= 0.02 per cell");
    ExperimentConfig config;
    config.kind = ExperimentKind::accuracy;
    config.lengths = {131072};
    config.seeds_per_cell = 10;
    config.mode = AmplitudeMode::deterministic_sqrt_psd; // the paper-protocol generator
    config.master_seed = 20260801;
    auto report = run_accuracy_experiment(config);
    for (const auto& row : report.rows) {
        c.check(row.failure.empty(), "cell failed: " + row.failure);
        if (!row.failure.empty()) continue;
        c.check(std::abs(row.mean_error) <= 0.02,
                fmt("H=%.2f: |mean err| = %.4f > 0.02", row.h_true,
                    std::abs(row.mean_error)));
        c.check(row.std_error <= 0.02,
                fmt("H=%.2f: std = %.4f > 0.02", row.h_true, row.std_error));
    }
}

void criterion5_short_series() {
    Criterion c(5, "short series: MAVAR std <= haar-LD std per cell, |mean err| <= 0.06");
    ExperimentConfig config;
    config.kind = ExperimentKind::accuracy;
    config.lengths = {1024, 2048};
    config.seeds_per_cell = 10;
    config.mode = AmplitudeMode::deterministic_sqrt_psd;
    config.methods = {EstimateMethod::mavar, EstimateMethod::haar_ld};
    config.master_seed = 20260802;
    auto report = run_accuracy_experiment(config);

    const std::size_t half = report.rows.size() / 2; // mavar rows first, then haarld
    for (std::size_t i = 0; i < half; ++i) {
        const auto& ma = report.rows[i];
        const auto& ld = report.rows[half + i];
        c.check(std::abs(ma.mean_error) <= 0.06,
                fmt("H=%.2f N=%.0f: MAVAR |mean err| = %.4f > 0.06", ma.h_true,
                    static_cast<double>(ma.n), std::abs(ma.mean_error)));
        c.check(ma.std_error <= ld.std_error,
                fmt("H=%.2f N=%.0f: MAVAR std exceeds haar-LD std", ma.h_true,
                    static_cast<double>(ma.n)) +
                    fmt(" (%.4f vs %.4f)", ma.std_error, ld.std_error));
    }
}

void criterion6_step_robustness() {
    Criterion c(6, "step robustness: |H shift| < 0.05 at N = 131072; worst M near N/2 short");
    {
        ExperimentConfig config;
        config.kind = ExperimentKind::step_robustness;
        config.hurst_values = {0.80};
        config.lengths = {131072};
        config.seeds_per_cell = 4;
        config.step_amplitudes = {0.0, 0.5, 1.0, 2.0};
        config.mode = AmplitudeMode::deterministic_sqrt_psd;
        config.master_seed = 20260803;
        auto report = run_step_robustness(config);
        for (const auto& row : report.rows) {
            c.check(row.failure.empty(), "cell failed: " + row.failure);
            if (!row.failure.empty()) continue;
            c.check(std::abs(row.mean_error) < 0.05,
                    fmt("A=%.1f M=%.2fN: |H shift| = %.4f >= 0.05", row.amplitude,
                        row.delay_fraction, std::abs(row.mean_error)));
        }
    }
    {
        ExperimentConfig config;
        config.kind = ExperimentKind::step_robustness;
        config.hurst_values = {0.80};
        config.lengths = {1024};
        config.seeds_per_cell = 16;
        config.step_amplitudes = {2.0};
        config.mode = AmplitudeMode::deterministic_sqrt_psd;
        config.master_seed = 20260804;
        auto report = run_step_robustness(config);
        std::size_t argmax = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
            const double shift = std::abs(report.rows[i].mean_error);
            if (shift > best) {
                best = shift;
                argmax = i;
            }
        }
        // delays are {0.05, 0.25, 0.50, 0.75, 0.95}; N/2 is index 2
        const bool near_half = argmax >= 1 && argmax <= 3;
        c.check(near_half, fmt("worst shift at delay %.2fN, not within one grid position of N/2",
                               report.rows[argmax].delay_fraction));
    }
}

void criterion7_theory_vs_ensemble() {
    Criterion c(7, "quadrature prediction matches a 20-seed ensemble within 10%");
    const std::size_t n_samples = 65536;
    const double tau0 = 1.0;
    const double alpha = -0.6;

    // the generator normalizes to unit variance, so the matching power-law
    // amplitude is 1 over the discrete spectral sum
    const double df = 1.0 / (static_cast<double>(n_samples) * tau0);
    double spectral_sum = 0.0;
    for (std::size_t k = 1; k <= n_samples / 2; ++k) {
        spectral_sum += std::pow(static_cast<double>(k) * df, alpha) * df;
    }
    PowerLawModel model;
    model.components = {{alpha, 1.0 / spectral_sum}};
    model.f_h = 0.5 / tau0;

    auto grid = make_tau_grid(n_samples);
    std::vector<double> mean_curve(grid.n_values.size(), 0.0);
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        auto x = gen_lrd(spec_for(alpha, n_samples, derive_seed(20260805, 0, 0, s),
                                  AmplitudeMode::rayleigh),
                         tau0);
        auto curve = mavar_fast(x, grid);
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            mean_curve[i] += curve.points[i].value / seeds;
        }
    }
    double worst = 0.0;
    std::int64_t worst_n = 0;
    for (std::size_t i = 0; i < grid.n_values.size(); ++i) {
        const std::int64_t n = grid.n_values[i];
        if (n <= 4 || n >= static_cast<std::int64_t>(n_samples / 30)) continue;
        const double theory = mavar_theoretical(model, static_cast<double>(n) * tau0, n);
        const double rel = std::abs(mean_curve[i] / theory - 1.0);
        if (rel > worst) {
            worst = rel;
            worst_n = n;
        }
    }
    c.check(worst <= 0.10,
            fmt("worst ensemble/theory deviation %.3f at n=%.0f", worst,
                static_cast<double>(worst_n)));
}

void criterion8_two_regime() {
    Criterion c(8, "two-regime mixture: segment slopes near -2.824/-1.80, break near 10 s");
    // the record must extend ~2 decades on each side of the 10 s crossover,
    // or the smooth blend region drags both segment slopes together
    const std::size_t n_samples = 1048576;
    const double tau0 = 0.01;
    const double alpha1 = -0.176, alpha2 = -1.20;
    const double tau_cross = 10.0;
    const std::int64_t n_cross = static_cast<std::int64_t>(std::llround(tau_cross / tau0));

    // normalized components have PSD f^alpha / D; pick the blend ratio so the
    // two theoretical curves cross at tau = 10 s
    const double df = 1.0 / (static_cast<double>(n_samples) * tau0);
    auto spectral_sum = [&](double alpha) {
        double sum = 0.0;
        for (std::size_t k = 1; k <= n_samples / 2; ++k) {
            sum += std::pow(static_cast<double>(k) * df, alpha) * df;
        }
        return sum;
    };
    const double d1 = spectral_sum(alpha1), d2 = spectral_sum(alpha2);
    PowerLawModel m1, m2;
    m1.components = {{alpha1, 1.0 / d1}};
    m1.f_h = 0.5 / tau0;
    m2.components = {{alpha2, 1.0 / d2}};
    m2.f_h = 0.5 / tau0;
    const double v1 = mavar_theoretical(m1, tau_cross, n_cross);
    const double v2 = mavar_theoretical(m2, tau_cross, n_cross);
    const double blend = std::sqrt(v1 / v2); // scales component 2 to cross at 10 s

    auto x1 = gen_lrd(spec_for(alpha1, n_samples, 303, AmplitudeMode::deterministic_sqrt_psd),
                      tau0);
    auto x2 = gen_lrd(spec_for(alpha2, n_samples, 304, AmplitudeMode::deterministic_sqrt_psd),
                      tau0);
    std::vector<double> mix(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        mix[k] = x1.samples[k] + blend * x2.samples[k];
    }
    auto x = make_series(std::move(mix), tau0, SeriesRole::rate, "mixture");

    auto curve = mavar_fast(x, make_tau_grid(n_samples));
    FitOptions options;
    options.tail_fraction = 0.5;               // reach tau ~ 870 s
    options.weighting = FitWeighting::uniform; // breakpoint search wants balanced residuals
    auto seg = fit_segments(curve, 2, options);

    c.check(std::abs(seg.segments[0].mu - (-2.824)) <= 0.15,
            fmt("first slope %.3f not within 0.15 of -2.824", seg.segments[0].mu));
    c.check(std::abs(seg.segments[1].mu - (-1.80)) <= 0.15,
            fmt("second slope %.3f not within 0.15 of -1.80", seg.segments[1].mu));
    const double bp = seg.breakpoints[0];
    c.check(bp >= tau_cross / 2.0 && bp <= tau_cross * 2.0,
            fmt("breakpoint %.2f s not within a factor 2 of 10 s", bp));
}

void criterion9_procedure_loop() {
    Criterion c(9, "pure-oracle loop: H = mu/2 + 2 recovers (1 - alpha)/2 within 0.02");
    for (double alpha : {0.0, -0.2, -0.4, -0.6, -0.8, -1.0}) {
        PowerLawModel model;
        model.components = {{alpha, 1.0}};
        model.f_h = 0.5;
        MavarCurve curve;
        curve.n_samples = 131072;
        curve.tau0 = 1.0;
        const double m1 = static_cast<double>(curve.n_samples) - 2.0;
        for (double nf = 5; nf <= 4369; nf *= 1.15) {
            const std::int64_t n = static_cast<std::int64_t>(std::llround(nf));
            MavarPoint p;
            p.n = n;
            p.tau = static_cast<double>(n);
            p.m = static_cast<std::int64_t>(curve.n_samples) - 3 * n + 1;
            p.conf = std::sqrt(static_cast<double>(p.m) / m1);
            p.value = mavar_theoretical(model, p.tau, n);
            curve.points.push_back(p);
        }
        const auto estimate = hurst_from_slope(fit_slope(curve));
        const double target = alpha_to_hurst(alpha);
        c.check(std::abs(estimate.hurst - target) < 0.02,
                fmt("alpha=%.1f: H = %.4f vs target %.4f", alpha, estimate.hurst, target));
    }
}

} // namespace

int main() {
    std::printf("MAVAR acceptance suite\n");
    criterion1_oracle_equivalence();
    criterion2_exact_closed_forms();
    criterion3_sine_response();
    criterion4_accuracy();
    criterion5_short_series();
    criterion6_step_robustness();
    criterion7_theory_vs_ensemble();
    criterion8_two_regime();
    criterion9_procedure_loop();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
