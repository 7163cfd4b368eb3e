#include "scalpel/spectrum.hpp"

#include <cmath>

#include "scalpel/errors.hpp"
#include "scalpel/fft.hpp"
#include "scalpel/ops.hpp"

namespace scalpel {

namespace {

using detail::make_result;
using detail::Node;
using fft::Complex;

struct Layout {
  std::size_t outer = 1;
  std::size_t inner = 1;
};

Layout layout_of(const Shape& shape, std::size_t axis) {
  Layout l;
  for (std::size_t i = 0; i < axis; ++i) l.outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) l.inner *= shape[i];
  return l;
}

// Real input (outer, T, inner) -> packed half spectrum (2, outer, S, inner).
std::vector<double> forward_real(const std::vector<double>& x, Layout l, std::size_t T) {
  const std::size_t S = half_spectrum_length(T);
  const std::size_t half = l.outer * S * l.inner;
  std::vector<double> out(2 * half);
  std::vector<Complex> line(T);
  for (std::size_t o = 0; o < l.outer; ++o) {
    for (std::size_t i = 0; i < l.inner; ++i) {
      for (std::size_t t = 0; t < T; ++t) line[t] = {x[(o * T + t) * l.inner + i], 0.0};
      fft::transform(line, false);
      for (std::size_t k = 0; k < S; ++k) {
        const std::size_t idx = (o * S + k) * l.inner + i;
        out[idx] = line[k].real();
        // DC and Nyquist are real for real input; drop FFT round-off there.
        const bool real_bin = k == 0 || 2 * k == T;
        out[half + idx] = real_bin ? 0.0 : line[k].imag();
      }
    }
  }
  return out;
}

// Weight of bin k when the half spectrum stands in for the full one.
double hermitian_weight(std::size_t k, std::size_t T) {
  if (k == 0) return 1.0;
  if (T % 2 == 0 && k == T / 2) return 1.0;
  return 2.0;
}

// Packed half spectrum -> real signal, 1/T scaled.
std::vector<double> inverse_real(const std::vector<double>& packed, Layout l, std::size_t T) {
  const std::size_t S = half_spectrum_length(T);
  const std::size_t half = l.outer * S * l.inner;
  std::vector<double> out(l.outer * T * l.inner);
  std::vector<Complex> line(T);
  const double scale = 1.0 / static_cast<double>(T);
  for (std::size_t o = 0; o < l.outer; ++o) {
    for (std::size_t i = 0; i < l.inner; ++i) {
      for (std::size_t k = 0; k < S; ++k) {
        const std::size_t idx = (o * S + k) * l.inner + i;
        line[k] = {packed[idx], packed[half + idx]};
      }
      line[0] = {line[0].real(), 0.0};
      if (T % 2 == 0) line[T / 2] = {line[T / 2].real(), 0.0};
      for (std::size_t k = S; k < T; ++k) line[k] = std::conj(line[T - k]);
      fft::transform(line, true);
      for (std::size_t t = 0; t < T; ++t) out[(o * T + t) * l.inner + i] = line[t].real() * scale;
    }
  }
  return out;
}

}  // namespace

std::size_t half_spectrum_length(std::size_t length) { return length / 2 + 1; }

Shape ComplexSpectrum::signal_shape() const {
  Shape s(packed.shape().begin() + 1, packed.shape().end());
  s[axis] = origin_length;
  return s;
}

Tensor ComplexSpectrum::real() const {
  Shape s(packed.shape().begin() + 1, packed.shape().end());
  return reshape(slice(packed, 0, 0, 1), s);
}

Tensor ComplexSpectrum::imag() const {
  Shape s(packed.shape().begin() + 1, packed.shape().end());
  return reshape(slice(packed, 0, 1, 1), s);
}

ComplexSpectrum ComplexSpectrum::with_packed(Tensor values) const {
  if (values.shape() != packed.shape()) {
    throw ShapeError("spectrum payload " + shape_str(values.shape()) + " does not match " +
                     shape_str(packed.shape()));
  }
  ComplexSpectrum out = *this;
  out.packed = std::move(values);
  return out;
}

ComplexSpectrum rfft(const Tensor& x, std::size_t axis, double sample_rate) {
  const Shape& shape = x.shape();
  if (axis >= shape.size()) throw ShapeError("rfft axis out of range for " + shape_str(shape));
  const std::size_t T = shape[axis];
  const std::size_t S = half_spectrum_length(T);
  const Layout l = layout_of(shape, axis);

  Shape packed_shape{2};
  packed_shape.insert(packed_shape.end(), shape.begin(), shape.end());
  packed_shape[axis + 1] = S;

  Tensor packed = make_result(packed_shape, forward_real(x.values(), l, T), {x}, [l, T, S](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    // dL/dx_t = Re sum_{k<S} (gRe_k + i gIm_k) e^{+2 pi i k t / T}
    auto& gp = p.grad_buffer();
    const std::size_t half = l.outer * S * l.inner;
    std::vector<Complex> line(T);
    for (std::size_t o = 0; o < l.outer; ++o) {
      for (std::size_t i = 0; i < l.inner; ++i) {
        std::fill(line.begin(), line.end(), Complex{});
        for (std::size_t k = 0; k < S; ++k) {
          const std::size_t idx = (o * S + k) * l.inner + i;
          line[k] = {self.grad[idx], self.grad[half + idx]};
        }
        fft::transform(line, true);
        for (std::size_t t = 0; t < T; ++t) gp[(o * T + t) * l.inner + i] += line[t].real();
      }
    }
  });

  ComplexSpectrum out;
  out.packed = std::move(packed);
  out.axis = axis;
  out.origin_length = T;
  out.sample_rate = sample_rate;
  return out;
}

Tensor irfft(const ComplexSpectrum& spectrum) { return irfft(spectrum, spectrum.origin_length); }

Tensor irfft(const ComplexSpectrum& spectrum, std::size_t length) {
  if (length != spectrum.origin_length) {
    throw ShapeError("irfft length " + std::to_string(length) + " does not match spectrum origin length " +
                     std::to_string(spectrum.origin_length));
  }
  const Shape& ps = spectrum.packed.shape();
  const std::size_t T = length;
  const std::size_t S = half_spectrum_length(T);
  if (ps.size() < 2 || ps[0] != 2 || spectrum.axis + 1 >= ps.size() || ps[spectrum.axis + 1] != S) {
    throw ShapeError("malformed spectrum payload " + shape_str(ps));
  }
  const Shape signal = spectrum.signal_shape();
  const Layout l = layout_of(signal, spectrum.axis);

  return make_result(signal, inverse_real(spectrum.packed.values(), l, T), {spectrum.packed},
                     [l, T, S](Node& self) {
                       Node& p = *self.parents[0];
                       if (!p.requires_grad) return;
                       // dL/dRe_k = (w_k/T) Re G_k, dL/dIm_k = (w_k/T) Im G_k with G = rfft(g);
                       // DC and Nyquist imaginary parts never reach the output.
                       auto& gp = p.grad_buffer();
                       const std::size_t half = l.outer * S * l.inner;
                       const auto g = forward_real(self.grad, l, T);
                       const double inv_t = 1.0 / static_cast<double>(T);
                       for (std::size_t o = 0; o < l.outer; ++o) {
                         for (std::size_t k = 0; k < S; ++k) {
                           const double w = hermitian_weight(k, T) * inv_t;
                           const bool real_only = k == 0 || (T % 2 == 0 && k == T / 2);
                           for (std::size_t i = 0; i < l.inner; ++i) {
                             const std::size_t idx = (o * S + k) * l.inner + i;
                             gp[idx] += w * g[idx];
                             if (!real_only) gp[half + idx] += w * g[half + idx];
                           }
                         }
                       }
                     });
}

Tensor amplitude(const ComplexSpectrum& spectrum) {
  const Shape& ps = spectrum.packed.shape();
  const Shape out_shape(ps.begin() + 1, ps.end());
  const std::size_t half = shape_numel(out_shape);
  const auto& v = spectrum.packed.values();
  std::vector<double> out(half);
  for (std::size_t i = 0; i < half; ++i) out[i] = std::hypot(v[i], v[half + i]);
  // Bins with no imaginary part (DC, Nyquist) reduce to |re|, which has a kink.
  if (detail::BranchTrace::active()) {
    for (std::size_t i = 0; i < half; ++i) {
      if (v[half + i] == 0.0) detail::BranchTrace::record(v[i] > 0);
    }
  }
  return make_result(out_shape, std::move(out), {spectrum.packed}, [half](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    for (std::size_t i = 0; i < half; ++i) {
      const double mag = self.data[i];
      if (mag == 0.0) continue;
      gp[i] += self.grad[i] * p.data[i] / mag;
      gp[half + i] += self.grad[i] * p.data[half + i] / mag;
    }
  });
}

}  // namespace scalpel
