#pragma once

#include <cstddef>
#include <vector>

#include "scalpel/tensor.hpp"

namespace scalpel {

struct AadlConfig {
  std::size_t spectral_length = 32;  // S_f
  double alpha = 100.0;
};

/// Amplitude spectrum of one ground-truth action segment on the shared
/// S_f-point frequency axis.
struct SegmentSpectrum {
  Tensor values;  // C x S_f x V
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  int class_id = -1;
};

struct AadlResult {
  Tensor loss;  // scalar
  /// Mean |F_b^n - F_b^{n-1}| for each adjacent pair, in order.
  std::vector<double> discrepancies;
  /// Set when fewer than two segments were supplied; loss is then 0.
  bool degenerate = false;
};

/// Splits C x T x V features at strictly increasing frame indices in (0, T).
/// Throws BoundaryError on a duplicate, unsorted or out-of-range boundary.
std::vector<Tensor> split_by_boundaries(const Tensor& features, const std::vector<std::size_t>& boundaries);

/// F_b = LI(|rfft(segment)|) resampled to `spectral_length` bins.
SegmentSpectrum segment_spectrum(const Tensor& segment, std::size_t spectral_length);

/// (1/(N-1)) sum_n -log(clamp(tanh(alpha * mean|F_b^n - F_b^{n-1}|), 1e-12, 1)).
AadlResult aadl_loss(const std::vector<SegmentSpectrum>& spectra, double alpha);

/// Split, per-segment spectra and loss for one sequence.
AadlResult adjacent_action_discrepancy(const Tensor& features, const std::vector<std::size_t>& boundaries,
                                       const AadlConfig& config);

}  // namespace scalpel
