#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "scalpel/params.hpp"
#include "scalpel/spectral_ops.hpp"

namespace scalpel {

struct MasfConfig {
  std::size_t num_filters = 4;          // M
  std::size_t max_filter_length = 64;   // R_max
  std::size_t pool_length = 64;         // T_d
  std::size_t projection_dim = 4;       // D
};

/// R_m = (M + m) R_max / 2M for m = 1..M. Throws ConfigError unless every
/// length is an integer.
std::vector<std::size_t> filter_lengths(std::size_t num_filters, std::size_t max_filter_length);

/// Learnable state of the multi-scale adaptive spectral filter.
struct MasfParams {
  MasfConfig config;
  std::vector<SpectralFilter> filters;  // 1 x R_m x V, initialized to ones
  Tensor static_weights;                // M x C, initialized to zeros
  Tensor joint_projection;              // V x D
  Tensor time_projection;               // T_d x D
  Tensor mix_projection;                // D*D x M

  static MasfParams init(const MasfConfig& config, std::size_t channels, std::size_t joints,
                         Initializer& init);
  void collect(ParamList& out, const std::string& prefix) const;
};

/// F_f^m = irfft(NNI(H_m) * rfft(F_s)) along time for each filter; F_s is C x T x V.
std::vector<Tensor> apply_filter_bank(const Tensor& features, const MasfParams& params);

/// Input-conditioned M x C channel weights: pool time to T_d, contract joints
/// with W_S and pooled time with W_T to C x D x D, flatten, project with W_M.
Tensor dynamic_weights(const Tensor& features, const MasfParams& params);

/// Channel-wise softmax fusion of both weight branches plus the half residual.
Tensor fuse(const std::vector<Tensor>& filtered, const Tensor& features, const Tensor& static_weights,
            const Tensor& dynamic_weights);

/// Full filter: bank, dynamic weights, fusion.
Tensor masf_forward(const Tensor& features, const MasfParams& params);

}  // namespace scalpel
