#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mavar/series.hpp"

namespace mavar {

// Geometric grid of averaging factors n. tau = n*tau0 is the observation
// interval; n can never exceed floor(N/3) or the estimator runs out of terms.
struct TauGrid {
    std::vector<std::int64_t> n_values;
    double ratio = 1.1;
};

// n_j = round(ratio^j), deduplicated, starting at 1 and capped at n_max (or
// floor(N/3)). The default ratio 1.1 puts about 24 points per decade.
TauGrid make_tau_grid(std::size_t n_samples, double ratio = 1.1,
                      std::optional<std::int64_t> n_max = std::nullopt);

struct MavarPoint {
    std::int64_t n = 0;
    double tau = 0.0;     // n * tau0
    double value = 0.0;   // Mod sigma_y^2(tau)
    std::int64_t m = 0;   // averaged terms, N - 3n + 1
    double conf = 0.0;    // relative confidence weight, sqrt(m / m(n=1))
};

struct MavarCurve {
    std::vector<MavarPoint> points;
    std::size_t n_samples = 0;
    double tau0 = 1.0;
    SeriesRole role_used = SeriesRole::rate;
    std::string source_label;
};

// Literal evaluation of the estimator
//
//   Mod sigma_y^2(n*tau0) = 1/(2 n^4 tau0^2 (N-3n+1))
//       * sum_{j=0}^{N-3n} [ sum_{i=j}^{j+n-1} (x_{i+2n} - 2 x_{i+n} + x_i) ]^2
//
// by the full triple loop. O(N*n) per point; kept as the correctness oracle
// for the fast path, not for production use.
double mavar_naive(const TimeSeries& x, std::int64_t n);

// Same quantity for every grid point via a sliding window on the inner sum:
// with D_i = x_{i+2n} - 2 x_{i+n} + x_i and W_j = sum_{i=j}^{j+n-1} D_i,
// W_{j+1} = W_j - D_j + D_{j+n}. O(N) per point, O(N * |grid|) total.
// Accumulation is in long double; agrees with mavar_naive to better than
// 1e-9 relative. Grid points are evaluated concurrently; the curve is
// assembled in grid order regardless of completion order.
MavarCurve mavar_fast(const TimeSeries& x, const TauGrid& grid);

// Curve CSV, header `n,tau,mavar,m,conf`, full precision (round-trip exact).
void write_curve_csv(const MavarCurve& curve, const std::string& path);
MavarCurve read_curve_csv(const std::string& path);

} // namespace mavar
