#pragma once

#include <cstddef>
#include <string>

#include "scalpel/params.hpp"
#include "scalpel/tensor.hpp"

namespace scalpel {

/// Two point-wise C x C channel mixers shared by the real and imaginary parts.
struct FacmParams {
  Tensor mix_first;   // W_c1
  Tensor mix_second;  // W_c2

  static FacmParams identity(std::size_t channels);
  void collect(ParamList& out, const std::string& prefix) const;
};

/// rfft along time, W_c2 W_c1 applied to the stacked real/imag parts, irfft.
/// Input and output are C x T.
Tensor facm_forward(const Tensor& features, const FacmParams& params);

/// Reference path: full complex DFT of each channel, multiplication by the
/// complex matrix W_c2 W_c1, inverse DFT, real part. No graph.
Tensor facm_complex_oracle(const Tensor& features, const FacmParams& params);

/// max |facm_forward(x) - facm_complex_oracle(x)|.
double complex_equivalence_check(const FacmParams& params, const Tensor& features);

}  // namespace scalpel
