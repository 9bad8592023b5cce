#include "mavar/synth.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "mavar/fft.hpp"
#include "mavar/rng.hpp"

namespace mavar {

const char* to_string(AmplitudeMode mode) {
    return mode == AmplitudeMode::rayleigh ? "rayleigh" : "deterministic";
}

AmplitudeMode amplitude_mode_from_string(const std::string& text) {
    if (text == "rayleigh") return AmplitudeMode::rayleigh;
    if (text == "deterministic" || text == "deterministic-sqrt-psd") {
        return AmplitudeMode::deterministic_sqrt_psd;
    }
    throw std::invalid_argument("unknown amplitude mode: '" + text + "'");
}

void validate_spec(const GeneratorSpec& spec) {
    if (spec.n < 8 || !is_power_of_two(spec.n)) {
        throw std::invalid_argument("generator: n must be a power of two >= 8, got " +
                                    std::to_string(spec.n));
    }
    if (!(spec.alpha > -5.0) || !(spec.alpha <= 0.0)) {
        throw std::invalid_argument("generator: alpha must lie in (-5, 0]");
    }
}

GeneratorSpec generator_spec_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    GeneratorSpec spec;
    spec.n = j.at("n").get<std::size_t>();
    if (j.contains("alpha")) {
        spec.alpha = j.at("alpha").get<double>();
        if (j.contains("hurst")) {
            const double h = j.at("hurst").get<double>();
            if (std::abs(hurst_to_alpha(h) - spec.alpha) > 1e-9) {
                throw std::invalid_argument("generator spec: alpha and hurst disagree");
            }
        }
    } else if (j.contains("hurst")) {
        const double h = j.at("hurst").get<double>();
        if (!(h >= 0.5) || !(h <= 1.0)) {
            throw std::invalid_argument("generator spec: hurst must lie in [0.5, 1]");
        }
        spec.alpha = hurst_to_alpha(h);
    } else {
        throw std::invalid_argument("generator spec: need alpha or hurst");
    }
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("mode")) spec.mode = amplitude_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("normalize")) spec.normalize = j.at("normalize").get<bool>();
    validate_spec(spec);
    return spec;
}

std::string generator_spec_to_json_text(const GeneratorSpec& spec) {
    nlohmann::json j;
    j["n"] = spec.n;
    j["alpha"] = spec.alpha;
    j["hurst"] = alpha_to_hurst(spec.alpha);
    j["seed"] = spec.seed;
    j["mode"] = to_string(spec.mode);
    j["normalize"] = spec.normalize;
    return j.dump(2);
}

TimeSeries gen_lrd(const GeneratorSpec& spec, double tau0) {
    validate_spec(spec);
    if (!(tau0 > 0.0) || !std::isfinite(tau0)) {
        throw std::invalid_argument("gen_lrd: tau0 must be positive");
    }

    const std::size_t n = spec.n;
    const double df = 1.0 / (static_cast<double>(n) * tau0);
    std::mt19937_64 rng(spec.seed);

    std::vector<std::complex<double>> bins(n, {0.0, 0.0});
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) * df;
        const double mean_square = std::pow(f, spec.alpha) * df;
        // draw order is part of the reproducibility contract: phase, then
        // (rayleigh only) amplitude, for k = 1..N/2 ascending
        const double u_phase = uniform01(rng);
        double amp;
        if (spec.mode == AmplitudeMode::rayleigh) {
            amp = rayleigh_from_mean_square(rng, mean_square);
        } else {
            amp = std::sqrt(mean_square);
        }
        if (k < n / 2) {
            const double phase = 2.0 * std::numbers::pi * u_phase;
            bins[k] = std::polar(amp, phase);
            bins[n - k] = std::conj(bins[k]);
        } else {
            // Nyquist bin must be real; the phase draw supplies the sign
            bins[k] = {u_phase < 0.5 ? -amp : amp, 0.0};
        }
    }

    fft_radix2(bins, +1);

    std::vector<double> samples(n);
    for (std::size_t k = 0; k < n; ++k) samples[k] = bins[k].real();

    if (spec.normalize) {
        double mean = 0.0;
        for (double v : samples) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : samples) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n - 1);
        if (!(var > 0.0)) throw std::runtime_error("gen_lrd: degenerate realization");
        const double scale = 1.0 / std::sqrt(var);
        for (double& v : samples) v = (v - mean) * scale;
    }

    std::string label = "lrd(alpha=" + std::to_string(spec.alpha) +
                        ",seed=" + std::to_string(spec.seed) + ")";
    return make_series(std::move(samples), tau0, SeriesRole::rate, std::move(label));
}

Contaminant make_offset_drift(double a, double b, double c) {
    Contaminant out;
    out.kind = Contaminant::Kind::offset_drift;
    out.a = a;
    out.b = b;
    out.c = c;
    return out;
}

Contaminant make_sine(double a, double fm) {
    Contaminant out;
    out.kind = Contaminant::Kind::sine;
    out.a = a;
    out.fm = fm;
    return out;
}

Contaminant make_step(double a, std::size_t m) {
    Contaminant out;
    out.kind = Contaminant::Kind::step;
    out.a = a;
    out.m = m;
    return out;
}

std::vector<Contaminant> contaminants_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_array()) throw std::invalid_argument("contaminants: expected a JSON array");
    std::vector<Contaminant> out;
    for (const auto& item : j) {
        const std::string kind = item.at("kind").get<std::string>();
        if (kind == "offset-drift") {
            out.push_back(make_offset_drift(item.value("a", 0.0), item.value("b", 0.0),
                                            item.value("c", 0.0)));
        } else if (kind == "sine") {
            out.push_back(make_sine(item.at("a").get<double>(), item.at("fm").get<double>()));
        } else if (kind == "step") {
            out.push_back(make_step(item.at("a").get<double>(), item.at("m").get<std::size_t>()));
        } else {
            throw std::invalid_argument("contaminants: unknown kind '" + kind + "'");
        }
    }
    return out;
}

std::string contaminants_to_json_text(const std::vector<Contaminant>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : list) {
        nlohmann::json j;
        switch (c.kind) {
        case Contaminant::Kind::offset_drift:
            j["kind"] = "offset-drift";
            j["a"] = c.a;
            j["b"] = c.b;
            j["c"] = c.c;
            break;
        case Contaminant::Kind::sine:
            j["kind"] = "sine";
            j["a"] = c.a;
            j["fm"] = c.fm;
            break;
        case Contaminant::Kind::step:
            j["kind"] = "step";
            j["a"] = c.a;
            j["m"] = c.m;
            break;
        }
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

TimeSeries apply_contaminant(const TimeSeries& series, const Contaminant& c) {
    const std::size_t n = series.samples.size();
    TimeSeries out = series;
    switch (c.kind) {
    case Contaminant::Kind::offset_drift: {
        for (std::size_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) * series.tau0;
            out.samples[k] += c.a + c.b * t + c.c * t * t;
        }
        break;
    }
    case Contaminant::Kind::sine: {
        if (!(c.fm > 0.0) || c.fm > 0.5 / series.tau0) {
            throw std::invalid_argument("sine contaminant: fm must lie in (0, Nyquist]");
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) * series.tau0;
            out.samples[k] += c.a * std::sin(2.0 * std::numbers::pi * c.fm * t);
        }
        break;
    }
    case Contaminant::Kind::step: {
        if (c.m <= 1 || c.m >= n) {
            throw std::invalid_argument("step contaminant: delay must satisfy 1 < m < N");
        }
        for (std::size_t k = c.m; k < n; ++k) out.samples[k] += c.a;
        break;
    }
    }
    return out;
}

} // namespace mavar
