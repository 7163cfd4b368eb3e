#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "scalpel/aadl.hpp"
#include "scalpel/backbone/graph.hpp"
#include "scalpel/backbone/layers.hpp"
#include "scalpel/backbone/losses.hpp"
#include "scalpel/masf.hpp"

namespace scalpel {

struct BackboneConfig {
  std::size_t in_channels = 3;           // C0
  std::size_t joints = 25;               // V
  std::size_t classes = 2;               // Q
  std::size_t channels = 64;             // C
  std::size_t scales = 13;               // K
  std::size_t graph_channels = 16;       // C1
  std::size_t attention_channels = 16;   // C2
  std::size_t fusion_channels = 8;       // C3
  std::size_t text_dim = 768;            // C_t
  std::size_t temporal_blocks = 10;      // L
  std::size_t class_stages = 1;          // S^c
  std::size_t boundary_stages = 2;       // S^b
  std::size_t refine_layers = 10;
  double adjacency_eps = 1e-3;
  double bn_eps = 1e-5;
  bool use_masf = true;
  bool use_facm = true;
  MasfConfig masf;

  void validate() const;
};

/// Every trainable tensor of the network. Parameters for MASF and FACM exist
/// even when the config disables them, so both variants draw the same
/// initial values for the shared layers.
struct BackboneParams {
  SpatialParams spatial;
  MasfParams masf;
  FusionHeadParams input_head;  // F_f -> F_t^0
  std::vector<TemporalBlockParams> blocks;
  HeadParams class_head;
  HeadParams boundary_head;
  std::vector<ClassStageParams> class_stages;
  std::vector<BoundaryStageParams> boundary_stages;
  Tensor text_projection;  // C_t x C

  static BackboneParams init(const BackboneConfig& config, std::uint64_t seed);
  /// Ordered, dotted-path view; names are stable and used by checkpoints.
  ParamList collect() const;
};

struct ForwardResult {
  Tensor spatial;         // F_s, C x T x V
  Tensor filtered;        // F_f, C x T x V
  Tensor representation;  // F_R, C x T
  std::vector<Tensor> class_logits;    // stage 0..S^c, each Q x T
  std::vector<Tensor> class_probs;     // softmax of the above
  std::vector<Tensor> boundary_logits;  // stage 0..S^b, each 1 x T
  std::vector<Tensor> boundary_probs;   // sigmoid of the above
};

class Backbone {
 public:
  Backbone(BackboneConfig config, SkeletonGraph graph, std::uint64_t seed);

  /// `input` is C0 x T x V.
  ForwardResult forward(const Tensor& input) const;

  const BackboneConfig& config() const { return config_; }
  const SkeletonGraph& graph() const { return graph_; }
  const Tensor& adjacency() const { return adjacency_; }
  BackboneParams& params() { return params_; }
  const BackboneParams& params() const { return params_; }
  ParamList parameters() const { return params_.collect(); }

 private:
  BackboneConfig config_;
  SkeletonGraph graph_;
  Tensor adjacency_;
  BackboneParams params_;
};

struct SequenceTargets {
  std::vector<int> labels;               // length T
  std::vector<std::size_t> boundaries;   // segment starts, strictly inside (0, T)
};

struct LossBreakdown {
  Tensor total;
  double segmentation = 0.0;
  double boundary = 0.0;
  double contrastive = 0.0;
  double discrepancy = 0.0;
  std::vector<double> adjacent_discrepancies;
};

/// Class id of each ground-truth segment.
std::vector<int> segment_classes(const SequenceTargets& targets);

/// All four training losses for one sequence. `input` feeds the Gaussian
/// similarity of GS-TMSE.
LossBreakdown compute_losses(const ForwardResult& result, const Tensor& input, const SequenceTargets& targets,
                             const BackboneParams& params, const TextEmbeddings& embeddings,
                             const LossWeights& weights, const AadlConfig& aadl);

}  // namespace scalpel
