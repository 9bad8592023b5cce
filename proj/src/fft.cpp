#include "mavar/fft.hpp"

#include <numbers>
#include <stdexcept>

namespace mavar {

void fft_radix2(std::vector<std::complex<double>>& data, int sign) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("fft_radix2: size must be a power of two");
    }
    if (n == 1) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    // one table of twiddles, indexed with a stride per stage
    std::vector<std::complex<double>> twiddle(n / 2);
    const double base = static_cast<double>(sign) * 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k) {
        twiddle[k] = std::polar(1.0, base * static_cast<double>(k));
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t block = 0; block < n; block += len) {
            for (std::size_t k = 0; k < half; ++k) {
                std::complex<double> u = data[block + k];
                std::complex<double> v = data[block + k + half] * twiddle[k * stride];
                data[block + k] = u + v;
                data[block + k + half] = u - v;
            }
        }
    }
}

} // namespace mavar
