#include "scalpel/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>

namespace scalpel::fft {

namespace {

struct Radix2Plan {
  std::size_t n = 0;
  std::vector<std::size_t> bit_reverse;
  std::vector<Complex> twiddles;  // e^{-2 pi i j / n}, j < n/2

  explicit Radix2Plan(std::size_t size) : n(size), bit_reverse(size), twiddles(size / 2) {
    std::size_t levels = 0;
    while ((std::size_t{1} << levels) < n) ++levels;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < levels; ++b) r |= ((i >> b) & 1u) << (levels - 1 - b);
      bit_reverse[i] = r;
    }
    for (std::size_t j = 0; j < n / 2; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
      twiddles[j] = {std::cos(angle), std::sin(angle)};
    }
  }

  void run(std::span<Complex> a, bool inverse) const {
    for (std::size_t i = 0; i < n; ++i) {
      if (i < bit_reverse[i]) std::swap(a[i], a[bit_reverse[i]]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n / len;
      for (std::size_t start = 0; start < n; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          Complex w = twiddles[j * step];
          if (inverse) w = std::conj(w);
          const Complex u = a[start + j];
          const Complex v = a[start + j + half] * w;
          a[start + j] = u + v;
          a[start + j + half] = u - v;
        }
      }
    }
  }
};

struct BluesteinPlan {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<Complex> chirp;         // e^{-i pi k^2 / n}
  std::vector<Complex> kernel_fft;    // FFT of conj(chirp) wrapped to length m
  std::shared_ptr<const Radix2Plan> inner;

  BluesteinPlan(std::size_t size, std::shared_ptr<const Radix2Plan> radix2, std::size_t padded)
      : n(size), m(padded), chirp(size), kernel_fft(padded), inner(std::move(radix2)) {
    for (std::size_t k = 0; k < n; ++k) {
      // k^2 mod 2n keeps the angle argument small for long transforms.
      const std::size_t k2 = (k * k) % (2 * n);
      const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
      chirp[k] = {std::cos(angle), std::sin(angle)};
    }
    kernel_fft[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
      kernel_fft[k] = std::conj(chirp[k]);
      kernel_fft[m - k] = std::conj(chirp[k]);
    }
    inner->run(kernel_fft, false);
  }

  void run(std::span<Complex> a, bool inverse) const {
    std::vector<Complex> work(m);
    for (std::size_t k = 0; k < n; ++k) {
      const Complex x = inverse ? std::conj(a[k]) : a[k];
      work[k] = x * chirp[k];
    }
    inner->run(work, false);
    for (std::size_t i = 0; i < m; ++i) work[i] *= kernel_fft[i];
    inner->run(work, true);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) {
      const Complex y = work[k] * scale * chirp[k];
      // The inverse transform is conj(F(conj(x))).
      a[k] = inverse ? std::conj(y) : y;
    }
  }
};

std::shared_ptr<const Radix2Plan> radix2_plan(std::size_t n) {
  thread_local std::map<std::size_t, std::shared_ptr<const Radix2Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const Radix2Plan>(n);
  return slot;
}

std::shared_ptr<const BluesteinPlan> bluestein_plan(std::size_t n) {
  thread_local std::map<std::size_t, std::shared_ptr<const BluesteinPlan>> cache;
  auto& slot = cache[n];
  if (!slot) {
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    slot = std::make_shared<const BluesteinPlan>(n, radix2_plan(m), m);
  }
  return slot;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void transform(std::span<Complex> data, bool inverse) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  if (is_power_of_two(n)) {
    radix2_plan(n)->run(data, inverse);
  } else {
    bluestein_plan(n)->run(data, inverse);
  }
}

}  // namespace scalpel::fft
