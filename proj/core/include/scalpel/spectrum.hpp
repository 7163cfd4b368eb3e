#pragma once

#include <cstddef>

#include "scalpel/tensor.hpp"

namespace scalpel {

/// Half spectrum of a real signal along one axis.
///
/// Real and imaginary parts live in a single differentiable tensor `packed`
/// with a leading extent of 2 (index 0 = real, 1 = imaginary); the remaining
/// axes are those of the source signal with the transformed axis shortened
/// to S = floor(T/2) + 1.
struct ComplexSpectrum {
  Tensor packed;
  /// Frequency axis in the *source* signal's coordinates (packed axis + 1).
  std::size_t axis = 0;
  std::size_t origin_length = 0;
  double sample_rate = 1.0;

  std::size_t bins() const { return origin_length / 2 + 1; }
  /// Physical frequency in Hz of bin k.
  double bin_frequency(std::size_t k) const {
    return static_cast<double>(k) * sample_rate / static_cast<double>(origin_length);
  }
  Shape signal_shape() const;
  Tensor real() const;
  Tensor imag() const;
  /// Same metadata, different payload.
  ComplexSpectrum with_packed(Tensor values) const;
};

std::size_t half_spectrum_length(std::size_t length);

/// Unnormalized real FFT along `axis` (backward convention).
ComplexSpectrum rfft(const Tensor& x, std::size_t axis, double sample_rate = 1.0);

/// Inverse of rfft, scaled by 1/T. Imaginary parts of the DC and (even T)
/// Nyquist bins are ignored, matching a Hermitian completion.
Tensor irfft(const ComplexSpectrum& spectrum);

/// As above; throws ShapeError unless `length == spectrum.origin_length`.
Tensor irfft(const ComplexSpectrum& spectrum, std::size_t length);

/// sqrt(re^2 + im^2) per bin; gradient 0 at the origin.
Tensor amplitude(const ComplexSpectrum& spectrum);

}  // namespace scalpel
