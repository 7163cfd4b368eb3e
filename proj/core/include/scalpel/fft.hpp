#pragma once

#include <complex>
#include <span>
#include <vector>

namespace scalpel::fft {

using Complex = std::complex<double>;

/// In-place unnormalized DFT of any length: X_k = sum_t x_t e^{-2 pi i k t / n}
/// (forward) or with e^{+...} when `inverse` is set. Radix-2 for powers of two,
/// Bluestein's chirp-z otherwise; O(n log n) either way.
void transform(std::span<Complex> data, bool inverse);

bool is_power_of_two(std::size_t n);

}  // namespace scalpel::fft
