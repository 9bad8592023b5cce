#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mavar/series.hpp"

namespace mavar {

// How the spectral coefficient magnitudes are drawn. Rayleigh gives each bin
// chi-squared power with the right mean, the statistically natural choice and
// the default; the deterministic mode pins every magnitude at the square root
// of the target so only the phases are random.
enum class AmplitudeMode { rayleigh, deterministic_sqrt_psd };

const char* to_string(AmplitudeMode mode);
AmplitudeMode amplitude_mode_from_string(const std::string& text);

// Recipe for a pseudo-random series with one-sided power-law spectrum
// S_x(f) = f^alpha up to the Nyquist cutoff. For long-range dependent data
// alpha lies in (-1, 0]; the generator accepts the full convergence range
// (-5, 0]. Hurst parameter and exponent are tied by alpha = 1 - 2H.
struct GeneratorSpec {
    std::size_t n = 0;          // series length; power of two, >= 8
    double alpha = 0.0;         // spectral exponent, -5 < alpha <= 0
    std::uint64_t seed = 0;
    AmplitudeMode mode = AmplitudeMode::rayleigh;
    bool normalize = true;      // shift/scale output to mean 0, variance 1
};

inline double hurst_to_alpha(double hurst) { return 1.0 - 2.0 * hurst; }
inline double alpha_to_hurst(double alpha) { return (1.0 - alpha) / 2.0; }

void validate_spec(const GeneratorSpec& spec);

// JSON object with keys n, alpha, hurst, seed, mode, normalize. Either alpha
// or hurst may be given on input (hurst must then lie in [0.5, 1]); both are
// emitted on output.
GeneratorSpec generator_spec_from_json_text(const std::string& text);
std::string generator_spec_to_json_text(const GeneratorSpec& spec);

// Spectral-shaping synthesis: for each positive frequency bin f_k = k/(N*tau0)
// a complex coefficient with mean-square magnitude S_x(f_k)*df and uniform
// phase; conjugate symmetry is enforced and the DC bin is zero, then an
// inverse transform yields the real series. Same spec -> bit-identical output.
TimeSeries gen_lrd(const GeneratorSpec& spec, double tau0);

// Deterministic signals superposed on a series for robustness studies:
// a level offset plus linear and quadratic drift, a sine, or a step that
// adds `a` to every sample from index m on.
struct Contaminant {
    enum class Kind { offset_drift, sine, step };
    Kind kind = Kind::step;
    double a = 0.0;
    double b = 0.0;       // offset_drift: linear drift per second
    double c = 0.0;       // offset_drift: quadratic drift per second^2
    double fm = 0.0;      // sine: frequency in hertz
    std::size_t m = 0;    // step: delay index, 1 < m < N
};

Contaminant make_offset_drift(double a, double b, double c);
Contaminant make_sine(double a, double fm);
Contaminant make_step(double a, std::size_t m);

std::vector<Contaminant> contaminants_from_json_text(const std::string& text);
std::string contaminants_to_json_text(const std::vector<Contaminant>& list);

TimeSeries apply_contaminant(const TimeSeries& series, const Contaminant& c);

} // namespace mavar
