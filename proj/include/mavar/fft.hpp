#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mavar {

inline bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

// In-place radix-2 transform; size must be a power of two.
// sign = -1: forward (e^{-i2pi jk/N}); sign = +1: inverse kernel.
// No 1/N scaling is applied in either direction. The operation order is
// fixed, so results are reproducible run to run.
void fft_radix2(std::vector<std::complex<double>>& data, int sign);

} // namespace mavar
