#pragma once

#include <cstdint>
#include <vector>

namespace mavar {

// One-sided power-law spectrum model for the sample sequence:
// S_x(f) = sum_i h_i * f^{alpha_i} for 0 < f <= f_h, zero above the cutoff.
struct PowerLawComponent {
    double alpha = 0.0; // exponent, -5 < alpha <= 0
    double h = 1.0;     // amplitude, > 0
};

struct PowerLawModel {
    std::vector<PowerLawComponent> components;
    double f_h = 0.5; // upper cutoff, hertz
};

void validate_model(const PowerLawModel& model);

// Squared magnitude of the variance's band-pass filter acting on the slope
// process y = x':
//
//   |H(n, f)|^2 = 2 sin^6(pi tau f) / ((n pi tau f)^2 sin^2(pi tau f / n))
//
// Total on f >= 0: the removable 0/0 points (f = 0 and multiples of n/tau)
// evaluate to their limits, all zero. Behaves as 2 (pi tau f)^2 for f -> 0;
// the main lobe sits near f = 1/(3 tau).
double transfer_mag_sq(std::int64_t n, double tau, double f);

// n -> infinity limit at fixed tau: 2 sin^6(pi f tau) / (pi f tau)^4.
// Already a good approximation of the finite-n filter for n > 4.
double transfer_limit_mag_sq(double tau, double f);

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0; // achieved error estimate
};

// Predicted variance for a power-law model: the integral of
// S_x(f) (2 pi f)^2 |H(n, f)|^2 over (0, f_h], summed per component.
// The integrand oscillates in filter lobes of width 1/tau; the first lobes
// are integrated by adaptive Gauss-Kronrod panels (with a power substitution
// against the f -> 0 singularity) and the remaining lobes, when the cutoff
// extends further, by the exact cosine decomposition of sin^6 with its
// boundary terms. Relative error target defaults to 1e-6; the achieved
// estimate is reported alongside the value.
QuadratureResult mavar_theoretical_ex(const PowerLawModel& model, double tau, std::int64_t n,
                                      double rel_tol = 1e-6);
double mavar_theoretical(const PowerLawModel& model, double tau, std::int64_t n);

// Closed-form variance response to a sine of amplitude a at frequency fm, in
// the normalized spectral-line convention (the line is pushed through the
// filter with no slope-differentiation factor):
//
//   a^2 sin^6(pi fm tau) / (pi fm tau)^4
//
// Zeros at tau = k/fm; the trig factor repeats with period 2/fm in tau.
// The variance engine applied to sampled data x_k = a sin(2 pi fm k tau0)
// returns (2 pi fm)^2 times the finite-n form below.
double mavar_sine(double a, double fm, double tau);

// Finite-n sine response in the same normalized convention:
// (a^2 / 2) * transfer_mag_sq(n, tau, fm).
double mavar_sine_finite(double a, double fm, double tau, std::int64_t n);

// Response to x(t) = a + b t + c t^2: exactly 2 c^2 tau^2. Offset and linear
// drift drop out entirely.
double mavar_quadratic(double c, double tau);

// Infinite-average response to a single level shift in x: identically zero.
// Finite records leak a small contribution that shrinks as the record grows;
// the engine tests quantify that against this ideal.
inline double mavar_step_limit(double /*amplitude*/) { return 0.0; }

} // namespace mavar
