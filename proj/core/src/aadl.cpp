#include "scalpel/aadl.hpp"

#include "scalpel/errors.hpp"
#include "scalpel/ops.hpp"
#include "scalpel/spectral_ops.hpp"
#include "scalpel/spectrum.hpp"

namespace scalpel {

std::vector<Tensor> split_by_boundaries(const Tensor& features, const std::vector<std::size_t>& boundaries) {
  if (features.rank() != 3) throw ShapeError("split_by_boundaries expects C x T x V features");
  const std::size_t T = features.dim(1);
  std::vector<Tensor> segments;
  std::size_t start = 0;
  for (std::size_t b : boundaries) {
    if (b <= start || b >= T) {
      throw BoundaryError("boundary " + std::to_string(b) + " yields an empty or out-of-range segment (T = " +
                          std::to_string(T) + ")");
    }
    segments.push_back(slice(features, 1, start, b - start));
    start = b;
  }
  segments.push_back(slice(features, 1, start, T - start));
  return segments;
}

SegmentSpectrum segment_spectrum(const Tensor& segment, std::size_t spectral_length) {
  if (spectral_length == 0) throw ConfigError("spectral length must be positive");
  SegmentSpectrum out;
  out.values = linear_resample(amplitude(rfft(segment, 1)), spectral_length);
  out.end = segment.dim(1);
  return out;
}

AadlResult aadl_loss(const std::vector<SegmentSpectrum>& spectra, double alpha) {
  if (alpha <= 0) throw ConfigError("AADL alpha must be positive");
  AadlResult result;
  if (spectra.size() < 2) {
    result.loss = Tensor::scalar(0.0);
    result.degenerate = true;
    return result;
  }
  Tensor total;
  for (std::size_t n = 1; n < spectra.size(); ++n) {
    if (spectra[n].values.shape() != spectra[n - 1].values.shape()) {
      throw ShapeError("segment spectra must share one shape");
    }
    const Tensor d = mean(abs(sub(spectra[n].values, spectra[n - 1].values)));
    result.discrepancies.push_back(d.item());
    // tanh never exceeds 1, so only the lower clamp (inside log) is active.
    const Tensor term = -log(tanh(mul_scalar(d, alpha)));
    total = total.defined() ? add(total, term) : term;
  }
  result.loss = mul_scalar(total, 1.0 / static_cast<double>(spectra.size() - 1));
  return result;
}

AadlResult adjacent_action_discrepancy(const Tensor& features, const std::vector<std::size_t>& boundaries,
                                       const AadlConfig& config) {
  const auto segments = split_by_boundaries(features, boundaries);
  std::vector<SegmentSpectrum> spectra;
  spectra.reserve(segments.size());
  std::size_t start = 0;
  for (const Tensor& seg : segments) {
    SegmentSpectrum s = segment_spectrum(seg, config.spectral_length);
    s.start = start;
    s.end = start + seg.dim(1);
    start = s.end;
    spectra.push_back(std::move(s));
  }
  return aadl_loss(spectra, config.alpha);
}

}  // namespace scalpel
