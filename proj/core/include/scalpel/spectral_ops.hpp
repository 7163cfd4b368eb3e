#pragma once

#include <cstddef>
#include <vector>

#include "scalpel/spectrum.hpp"
#include "scalpel/tensor.hpp"

namespace scalpel {

/// Learnable real spectral filter of shape 1 x R x V.
struct SpectralFilter {
  Tensor weights;

  std::size_t scale_length() const { return weights.dim(1); }
  std::size_t joints() const { return weights.dim(2); }

  static SpectralFilter ones(std::size_t length, std::size_t joints);
};

/// Nearest-neighbour index map: output s reads source floor(s * R / S).
std::vector<std::size_t> nni_indices(std::size_t source_length, std::size_t target_length);

/// Row-major target x source matrices for the constant resampling maps.
std::vector<double> nni_matrix(std::size_t source_length, std::size_t target_length);
/// Corner-aligned linear interpolation onto `target_length` evenly spaced points.
std::vector<double> linear_resample_matrix(std::size_t source_length, std::size_t target_length);
/// Output bin i averages source indices [floor(i T / Td), ceil((i + 1) T / Td)).
std::vector<double> adaptive_pool_matrix(std::size_t source_length, std::size_t target_length);

/// Stretches a 1 x R x V filter to 1 x S x V; gradient scatters back to source bins.
Tensor nni_interpolate(const SpectralFilter& filter, std::size_t target_length);

/// Resamples axis 1 of a C x S_n x V tensor to S_f points, endpoints preserved.
Tensor linear_resample(const Tensor& spectrum, std::size_t target_length);

/// Adaptive average pooling along `axis` to `target_length` bins.
Tensor adaptive_avg_pool(const Tensor& x, std::size_t axis, std::size_t target_length);

}  // namespace scalpel
