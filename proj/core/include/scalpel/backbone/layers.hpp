#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "scalpel/facm.hpp"
#include "scalpel/params.hpp"
#include "scalpel/tensor.hpp"

namespace scalpel {

// Layout conventions: spatial features are C x T x V, temporal features C x T.

/// Multi-scale GCN followed by the dynamic (P/Q difference) GCN.
struct SpatialParams {
  Tensor adjacency_bias;   // B, V x KV, zero-initialized
  Tensor gcn_weight;       // W_s0, C x K*C0
  Tensor p_temporal;       // C1 x C
  Tensor q_temporal;       // C1 x C
  Tensor p_channel;        // C1 x C
  Tensor q_channel;        // C1 x C
  Tensor channel_expand;   // C x C1, lifts the C1 channel graphs to C
  Tensor graph_weight;     // W_s1, C x C
  Tensor bn_scale;         // C x 1, ones
  Tensor bn_shift;         // C x 1, zeros

  static SpatialParams init(std::size_t in_channels, std::size_t channels, std::size_t joints,
                            std::size_t scales, std::size_t graph_channels, Initializer& init);
  void collect(ParamList& out, const std::string& prefix) const;
};

/// ReLU(W_s0 * reshape((A^MS + B) X)). X is C0 x T x V, A^MS is V x KV.
Tensor multiscale_gcn(const Tensor& input, const Tensor& adjacency, const SpatialParams& params,
                      std::size_t scales);

/// Per-channel normalization over every non-channel axis with batch statistics.
Tensor batch_norm(const Tensor& x, const Tensor& scale, const Tensor& shift, double eps);

/// G^T (T x V x V) and G^C (C1 x V x V) as cross-joint differences of pooled
/// P/Q projections; exposed for tests.
Tensor temporal_graph(const Tensor& features, const Tensor& p, const Tensor& q);
Tensor channel_graph(const Tensor& features, const Tensor& p, const Tensor& q);

/// ReLU(BN(F_s1 G^T + F_s1 G^C)) + F_s0. `text_graph` may be undefined.
Tensor dynamic_gcn(const Tensor& features, const SpatialParams& params, const Tensor& text_graph,
                   double bn_eps);

/// Linear-attention transformer layer on C x T features.
struct AttentionParams {
  Tensor query;   // C2 x C
  Tensor key;     // C2 x C
  Tensor value;   // C2 x C
  Tensor output;  // W_t, C x C2

  static AttentionParams init(std::size_t channels, std::size_t attention_channels, Initializer& init);
  void collect(ParamList& out, const std::string& prefix) const;
};

/// ReLU(F + W_t (V_t sigmoid(K_t)^T / T) sigmoid(Q_t)). Values come from
/// `context` when it is defined (cross-attention), otherwise from `features`.
Tensor linear_transformer_block(const Tensor& features, const AttentionParams& params,
                                const Tensor& context = Tensor());

/// Point-wise C -> C3, fold joints into channels, point-wise V*C3 -> C.
struct FusionHeadParams {
  Tensor reduce;  // C3 x C
  Tensor merge;   // C x V*C3

  static FusionHeadParams init(std::size_t channels, std::size_t joints, std::size_t fusion_channels,
                               Initializer& init);
  void collect(ParamList& out, const std::string& prefix) const;
};

Tensor spatial_channel_fusion(const Tensor& features, const FusionHeadParams& params);

/// GeLU(W_l W_f [F_t0; F_t2]) + F_t2.
Tensor adaptive_fusion(const Tensor& spatial, const Tensor& temporal, const Tensor& fuse_weight,
                       const Tensor& lift_weight);

struct TemporalBlockParams {
  AttentionParams attention;
  FacmParams facm;
  FusionHeadParams head;  // produces this block's F_t0 from F_f
  Tensor fuse_weight;     // W_f, C x 2C
  Tensor lift_weight;     // W_l, C x C

  static TemporalBlockParams init(std::size_t channels, std::size_t joints, std::size_t attention_channels,
                                  std::size_t fusion_channels, Initializer& init);
  void collect(ParamList& out, const std::string& prefix) const;
};

/// LT -> FACM (skipped when `use_facm` is false) -> adaptive fusion with F_t0.
Tensor temporal_block(const Tensor& features, const Tensor& spatial, const TemporalBlockParams& params,
                      bool use_facm);

/// Linear classifier with bias: weight is Out x C, bias Out x 1.
struct HeadParams {
  Tensor weight;
  Tensor bias;

  static HeadParams init(std::size_t outputs, std::size_t channels, Initializer& init);
  void collect(ParamList& out, const std::string& prefix) const;
  Tensor operator()(const Tensor& features) const;
};

/// Class refinement stage: embeds the previous stage's probabilities and runs
/// cross-attention layers against the previous stage's features.
struct ClassStageParams {
  Tensor input;  // C x Q
  std::vector<AttentionParams> layers;
  HeadParams head;

  static ClassStageParams init(std::size_t classes, std::size_t channels, std::size_t attention_channels,
                               std::size_t layers, Initializer& init);
  void collect(ParamList& out, const std::string& prefix) const;
};

struct ClassStageOutput {
  Tensor features;  // C x T
  Tensor logits;    // Q x T
  Tensor probs;     // softmax over classes
};

ClassStageOutput class_stage(const Tensor& previous_probs, const Tensor& context, const ClassStageParams& params);

/// x + W_1x1 ReLU(W_d [x(t-d); x(t); x(t+d)]).
struct DilatedLayerParams {
  Tensor dilated;  // C x 3C
  Tensor mix;      // C x C
};

struct BoundaryStageParams {
  Tensor input;  // C x 1
  std::vector<DilatedLayerParams> layers;
  HeadParams head;

  static BoundaryStageParams init(std::size_t channels, std::size_t layers, Initializer& init);
  void collect(ParamList& out, const std::string& prefix) const;
};

Tensor dilated_residual(const Tensor& features, const DilatedLayerParams& params, std::size_t dilation);

/// Boundary refinement stage; takes 1 x T probabilities, returns 1 x T logits.
Tensor boundary_stage(const Tensor& previous_probs, const BoundaryStageParams& params);

}  // namespace scalpel
