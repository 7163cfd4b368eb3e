#include "scalpel/facm.hpp"

#include <complex>

#include "scalpel/errors.hpp"
#include "scalpel/fft.hpp"
#include "scalpel/ops.hpp"
#include "scalpel/spectrum.hpp"

namespace scalpel {

FacmParams FacmParams::identity(std::size_t channels) {
  Initializer init(0);
  return FacmParams{init.identity(channels), init.identity(channels)};
}

void FacmParams::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + "mix_first", mix_first});
  out.push_back({prefix + "mix_second", mix_second});
}

Tensor facm_forward(const Tensor& features, const FacmParams& params) {
  if (features.rank() != 2) throw ShapeError("FACM expects C x T features");
  const std::size_t C = features.dim(0);
  const Shape square{C, C};
  if (params.mix_first.shape() != square || params.mix_second.shape() != square) {
    throw ShapeError("FACM mixers must be " + shape_str(square));
  }
  const ComplexSpectrum spectrum = rfft(features, 1);  // packed 2 x C x S
  const Tensor mixed = matmul(params.mix_second, matmul(params.mix_first, spectrum.packed));
  return irfft(spectrum.with_packed(mixed));
}

Tensor facm_complex_oracle(const Tensor& features, const FacmParams& params) {
  using fft::Complex;
  const std::size_t C = features.dim(0);
  const std::size_t T = features.dim(1);
  const auto& w1 = params.mix_first.values();
  const auto& w2 = params.mix_second.values();
  std::vector<double> w(C * C, 0.0);
  for (std::size_t i = 0; i < C; ++i) {
    for (std::size_t k = 0; k < C; ++k) {
      for (std::size_t j = 0; j < C; ++j) w[i * C + j] += w2[i * C + k] * w1[k * C + j];
    }
  }
  const auto& x = features.values();
  std::vector<std::vector<Complex>> spectra(C, std::vector<Complex>(T));
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t t = 0; t < T; ++t) spectra[c][t] = x[c * T + t];
    fft::transform(spectra[c], false);
  }
  std::vector<double> out(C * T);
  std::vector<Complex> line(T);
  for (std::size_t i = 0; i < C; ++i) {
    std::fill(line.begin(), line.end(), Complex{});
    for (std::size_t j = 0; j < C; ++j) {
      for (std::size_t s = 0; s < T; ++s) line[s] += w[i * C + j] * spectra[j][s];
    }
    fft::transform(line, true);
    for (std::size_t t = 0; t < T; ++t) out[i * T + t] = line[t].real() / static_cast<double>(T);
  }
  return Tensor({C, T}, std::move(out));
}

double complex_equivalence_check(const FacmParams& params, const Tensor& features) {
  NoGradGuard guard;
  return max_abs_diff(facm_forward(features, params), facm_complex_oracle(features, params));
}

}  // namespace scalpel
