#include "scalpel/spectral_ops.hpp"

#include <cmath>

#include "scalpel/errors.hpp"
#include "scalpel/ops.hpp"

namespace scalpel {

SpectralFilter SpectralFilter::ones(std::size_t length, std::size_t joints) {
  if (length == 0 || joints == 0) throw ConfigError("spectral filter extents must be positive");
  return SpectralFilter{Tensor::ones({1, length, joints}, true)};
}

std::vector<std::size_t> nni_indices(std::size_t source_length, std::size_t target_length) {
  if (source_length == 0 || target_length == 0) throw ShapeError("nni lengths must be positive");
  std::vector<std::size_t> idx(target_length);
  for (std::size_t s = 0; s < target_length; ++s) idx[s] = s * source_length / target_length;
  return idx;
}

std::vector<double> nni_matrix(std::size_t source_length, std::size_t target_length) {
  std::vector<double> m(target_length * source_length, 0.0);
  const auto idx = nni_indices(source_length, target_length);
  for (std::size_t s = 0; s < target_length; ++s) m[s * source_length + idx[s]] = 1.0;
  return m;
}

std::vector<double> linear_resample_matrix(std::size_t source_length, std::size_t target_length) {
  if (source_length == 0 || target_length == 0) throw ShapeError("resample lengths must be positive");
  std::vector<double> m(target_length * source_length, 0.0);
  for (std::size_t i = 0; i < target_length; ++i) {
    double* row = m.data() + i * source_length;
    if (source_length == 1 || target_length == 1) {
      row[0] = 1.0;
      continue;
    }
    if (i == target_length - 1) {
      row[source_length - 1] = 1.0;
      continue;
    }
    const double pos = static_cast<double>(i) * static_cast<double>(source_length - 1) /
                       static_cast<double>(target_length - 1);
    const auto left = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(left);
    row[left] += 1.0 - frac;
    if (frac > 0.0) row[left + 1] += frac;
  }
  return m;
}

std::vector<double> adaptive_pool_matrix(std::size_t source_length, std::size_t target_length) {
  if (source_length == 0 || target_length == 0) throw ShapeError("pool lengths must be positive");
  std::vector<double> m(target_length * source_length, 0.0);
  for (std::size_t i = 0; i < target_length; ++i) {
    const std::size_t begin = i * source_length / target_length;
    const std::size_t end = ((i + 1) * source_length + target_length - 1) / target_length;
    const double w = 1.0 / static_cast<double>(end - begin);
    for (std::size_t j = begin; j < end; ++j) m[i * source_length + j] = w;
  }
  return m;
}

Tensor nni_interpolate(const SpectralFilter& filter, std::size_t target_length) {
  if (filter.weights.rank() != 3 || filter.weights.dim(0) != 1) {
    throw ShapeError("spectral filter must be 1 x R x V, got " + shape_str(filter.weights.shape()));
  }
  const std::size_t R = filter.scale_length();
  if (R == target_length) return filter.weights;
  return linear_map(filter.weights, 1, nni_matrix(R, target_length), target_length, R);
}

Tensor linear_resample(const Tensor& spectrum, std::size_t target_length) {
  if (spectrum.rank() != 3) throw ShapeError("linear_resample expects C x S x V");
  const std::size_t source = spectrum.dim(1);
  if (source == target_length) return spectrum;
  return linear_map(spectrum, 1, linear_resample_matrix(source, target_length), target_length, source);
}

Tensor adaptive_avg_pool(const Tensor& x, std::size_t axis, std::size_t target_length) {
  const std::size_t source = x.dim(axis);
  if (source == target_length) return x;
  return linear_map(x, axis, adaptive_pool_matrix(source, target_length), target_length, source);
}

}  // namespace scalpel
