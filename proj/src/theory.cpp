#include "mavar/theory.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace mavar {

namespace {

constexpr double kPi = std::numbers::pi;

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double value = 0.0;
    double err = 0.0;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double halflen = 0.5 * (b - a);

    const double fc = f(center);
    double res_gauss = kWg[3] * fc;
    double res_kronrod = kWgk[7] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = halflen * kXgk[i];
        const double fsum = f(center - dx) + f(center + dx);
        res_kronrod += kWgk[i] * fsum;
        if (i % 2 == 1) res_gauss += kWg[i / 2] * fsum;
    }
    Panel out;
    out.value = res_kronrod * halflen;
    out.err = std::abs((res_kronrod - res_gauss) * halflen);
    return out;
}

// Bisecting adaptive quadrature on [a, b]. Accepts a node once the embedded
// error estimate drops under rel_tol locally or abs_tol globally.
Panel adaptive_gk(const std::function<double(double)>& f, double a, double b, double rel_tol,
                  double abs_tol, int max_depth = 40) {
    struct Node {
        double a, b;
        int depth;
    };
    Panel total;
    std::vector<Node> stack{{a, b, 0}};
    while (!stack.empty()) {
        Node node = stack.back();
        stack.pop_back();
        Panel p = gk15(f, node.a, node.b);
        const bool converged = p.err <= std::max(abs_tol, rel_tol * std::abs(p.value));
        if (converged || node.depth >= max_depth) {
            total.value += p.value;
            total.err += p.err;
            continue;
        }
        const double mid = 0.5 * (node.a + node.b);
        stack.push_back({node.a, mid, node.depth + 1});
        stack.push_back({mid, node.b, node.depth + 1});
    }
    return total;
}

// (w / sin w)^2, stable near w = 0. Valid for w in [0, pi).
double dirichlet_sq(double w) {
    if (std::abs(w) < 1e-4) {
        const double w2 = w * w;
        return 1.0 + w2 / 3.0 + w2 * w2 / 15.0;
    }
    const double s = std::sin(w);
    return (w / s) * (w / s);
}

// d/dw of (w/sin w)^2 = 2 (w/sin^2 w)(1 - w cot w).
double dirichlet_sq_deriv(double w) {
    if (std::abs(w) < 1e-4) return 2.0 * w / 3.0;
    const double s = std::sin(w);
    const double c = std::cos(w);
    return 2.0 * (w / (s * s)) * (1.0 - w * c / s);
}

} // namespace

double transfer_mag_sq(std::int64_t n, double tau, double f) {
    if (n < 1) throw std::invalid_argument("transfer_mag_sq: n must be >= 1");
    if (!(tau > 0.0)) throw std::invalid_argument("transfer_mag_sq: tau must be positive");
    if (f < 0.0) throw std::invalid_argument("transfer_mag_sq: f must be >= 0");
    if (f == 0.0) return 0.0;

    const double theta = kPi * tau * f;          // argument of the sin^6 numerator
    const double phi = theta / static_cast<double>(n);
    const double delta = std::remainder(phi, kPi); // distance from the nearest sin^2 zero

    // Near a denominator zero both numerator and denominator vanish; the
    // reduced angles keep the ratio well conditioned there.
    if (std::abs(delta) * static_cast<double>(n) < 0.25) {
        if (delta == 0.0) return 0.0;
        const double snd = std::sin(static_cast<double>(n) * delta); // = +-sin(theta)
        const double sd = std::sin(delta);                           // = +-sin(phi)
        const double ratio = snd / (static_cast<double>(n) * sd);
        const double s2 = snd * snd;
        return 2.0 * s2 * s2 * ratio * ratio / (theta * theta);
    }

    const double st = std::sin(theta);
    const double sp = std::sin(delta); // |sin(phi)| up to sign
    const double s2 = st * st;
    const double denom = static_cast<double>(n) * theta * sp;
    return 2.0 * s2 * s2 * s2 / (denom * denom);
}

double transfer_limit_mag_sq(double tau, double f) {
    if (!(tau > 0.0)) throw std::invalid_argument("transfer_limit_mag_sq: tau must be positive");
    if (f < 0.0) throw std::invalid_argument("transfer_limit_mag_sq: f must be >= 0");
    if (f == 0.0) return 0.0;
    const double u = kPi * f * tau;
    const double s = std::sin(u);
    const double s2 = s * s;
    return 2.0 * s2 * s2 * s2 / (u * u * u * u);
}

void validate_model(const PowerLawModel& model) {
    if (model.components.empty()) {
        throw std::invalid_argument("power-law model: need at least one component");
    }
    for (const auto& comp : model.components) {
        if (!(comp.alpha > -5.0) || !(comp.alpha <= 0.0)) {
            throw std::invalid_argument("power-law model: alpha must lie in (-5, 0]");
        }
        if (!(comp.h > 0.0)) {
            throw std::invalid_argument("power-law model: amplitude must be positive");
        }
    }
    if (!(model.f_h > 0.0)) {
        throw std::invalid_argument("power-law model: cutoff must be positive");
    }
}

QuadratureResult mavar_theoretical_ex(const PowerLawModel& model, double tau, std::int64_t n,
                                      double rel_tol) {
    validate_model(model);
    if (!(tau > 0.0)) throw std::invalid_argument("mavar_theoretical: tau must be positive");
    if (n < 1) throw std::invalid_argument("mavar_theoretical: n must be >= 1");

    QuadratureResult total;
    const double u_h = model.f_h * tau; // frequency in lobe units, f * tau

    for (const auto& comp : model.components) {
        const double alpha = comp.alpha;
        const double h = comp.h;

        // integrand over u = f*tau (du absorbs the 1/tau of df)
        auto integrand = [&](double u) -> double {
            if (u <= 0.0) return 0.0;
            const double f = u / tau;
            const double omega = 2.0 * kPi * f;
            return h * std::pow(f, alpha) * omega * omega * transfer_mag_sq(n, tau, f) / tau;
        };

        // The cosine-decomposition tail needs the smooth amplitude, which has
        // poles at u = k*n; inside the Nyquist-style cutoffs used in practice
        // u_h = n/2, so the explicit region covers everything else.
        const bool tail_ok = u_h < 0.9 * static_cast<double>(n);
        double u_explicit = tail_ok ? std::min(u_h, 48.0) : u_h;
        if (!tail_ok && u_h > 2e5) {
            throw std::invalid_argument(
                "mavar_theoretical: cutoff too far beyond the filter scale (f_h*tau too large)");
        }

        const double panel_rel = std::min(1e-9, rel_tol * 1e-2);
        double comp_value = 0.0;
        double comp_err = 0.0;

        // first lobe [0, 1]: substitute u = t^q to flatten the power singularity
        {
            const double upper = std::min(1.0, u_explicit);
            const int q = std::max(1, static_cast<int>(std::ceil(4.0 / (alpha + 5.0))));
            auto flattened = [&](double t) -> double {
                const double u = std::pow(t, q);
                return integrand(u) * static_cast<double>(q) * std::pow(t, q - 1);
            };
            Panel p = adaptive_gk(flattened, 0.0, std::pow(upper, 1.0 / q), panel_rel, 0.0);
            comp_value += p.value;
            comp_err += p.err;
        }

        for (double lo = 1.0; lo < u_explicit; lo += 1.0) {
            const double hi = std::min(lo + 1.0, u_explicit);
            Panel p = adaptive_gk(integrand, lo, hi, panel_rel,
                                  1e-12 * std::abs(comp_value) / std::max(1.0, u_explicit));
            comp_value += p.value;
            comp_err += p.err;
        }

        if (tail_ok && u_h > u_explicit) {
            // sin^6(pi u) = 5/16 - 15/32 cos(2 pi u) + 3/16 cos(4 pi u) - 1/32 cos(6 pi u);
            // the smooth amplitude A(u) = beta u^{alpha-2} (pi u/n)^2 / sin^2(pi u/n)
            const double beta = 8.0 * h / (kPi * kPi * std::pow(tau, alpha + 3.0));
            const double wk = kPi / static_cast<double>(n);
            auto amp = [&](double u) -> double {
                return beta * std::pow(u, alpha - 2.0) * dirichlet_sq(wk * u);
            };
            auto amp_deriv = [&](double u) -> double {
                return beta * ((alpha - 2.0) * std::pow(u, alpha - 3.0) * dirichlet_sq(wk * u) +
                               std::pow(u, alpha - 2.0) * wk * dirichlet_sq_deriv(wk * u));
            };

            // smooth part on geometric subpanels
            double smooth = 0.0;
            for (double lo = u_explicit; lo < u_h;) {
                const double hi = std::min(lo * 2.0, u_h);
                Panel p = adaptive_gk(amp, lo, hi, panel_rel, 0.0);
                smooth += p.value;
                comp_err += p.err * (5.0 / 16.0);
                lo = hi;
            }
            double tail = (5.0 / 16.0) * smooth;

            // oscillatory parts by parts: int A cos = [A sin/th + A' cos/th^2] - int A''/th^2
            constexpr double kCos[3] = {-15.0 / 32.0, 3.0 / 16.0, -1.0 / 32.0};
            const double a0 = amp(u_explicit), a1 = amp(u_h);
            const double d0 = amp_deriv(u_explicit), d1 = amp_deriv(u_h);
            for (int mth = 1; mth <= 3; ++mth) {
                const double th = 2.0 * kPi * static_cast<double>(mth);
                const double hi_term =
                    a1 * std::sin(th * u_h) / th + d1 * std::cos(th * u_h) / (th * th);
                const double lo_term = a0 * std::sin(th * u_explicit) / th +
                                       d0 * std::cos(th * u_explicit) / (th * th);
                tail += kCos[mth - 1] * (hi_term - lo_term);
                comp_err += std::abs(kCos[mth - 1]) * std::abs(d0 - d1) / (th * th);
            }
            comp_value += tail;
        }

        total.value += comp_value;
        total.abs_error += comp_err;
    }
    return total;
}

double mavar_theoretical(const PowerLawModel& model, double tau, std::int64_t n) {
    return mavar_theoretical_ex(model, tau, n).value;
}

double mavar_sine(double a, double fm, double tau) {
    if (!(fm > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("mavar_sine: fm and tau must be positive");
    }
    const double u = kPi * fm * tau;
    const double s = std::sin(u);
    const double s2 = s * s;
    return a * a * s2 * s2 * s2 / (u * u * u * u);
}

double mavar_sine_finite(double a, double fm, double tau, std::int64_t n) {
    return 0.5 * a * a * transfer_mag_sq(n, tau, fm);
}

double mavar_quadratic(double c, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("mavar_quadratic: tau must be positive");
    return 2.0 * c * c * tau * tau;
}

} // namespace mavar
