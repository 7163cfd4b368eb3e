#include "scalpel/backbone/model.hpp"

#include "scalpel/errors.hpp"
#include "scalpel/ops.hpp"

namespace scalpel {

void BackboneConfig::validate() const {
  const std::size_t dims[] = {in_channels,    joints,          classes,    channels,
                              scales,         graph_channels,  attention_channels,
                              fusion_channels, text_dim};
  for (std::size_t d : dims) {
    if (d == 0) throw ConfigError("backbone dimensions must be positive");
  }
  if (!(adjacency_eps > 0) || !(bn_eps > 0)) throw ConfigError("epsilons must be positive");
  filter_lengths(masf.num_filters, masf.max_filter_length);
  if (masf.pool_length == 0 || masf.projection_dim == 0) throw ConfigError("MASF dimensions must be positive");
}

BackboneParams BackboneParams::init(const BackboneConfig& c, std::uint64_t seed) {
  c.validate();
  Initializer init(seed);
  BackboneParams p;
  p.spatial = SpatialParams::init(c.in_channels, c.channels, c.joints, c.scales, c.graph_channels, init);
  p.masf = MasfParams::init(c.masf, c.channels, c.joints, init);
  p.input_head = FusionHeadParams::init(c.channels, c.joints, c.fusion_channels, init);
  for (std::size_t l = 0; l < c.temporal_blocks; ++l) {
    p.blocks.push_back(
        TemporalBlockParams::init(c.channels, c.joints, c.attention_channels, c.fusion_channels, init));
  }
  p.class_head = HeadParams::init(c.classes, c.channels, init);
  p.boundary_head = HeadParams::init(1, c.channels, init);
  for (std::size_t s = 0; s < c.class_stages; ++s) {
    p.class_stages.push_back(
        ClassStageParams::init(c.classes, c.channels, c.attention_channels, c.refine_layers, init));
  }
  for (std::size_t s = 0; s < c.boundary_stages; ++s) {
    p.boundary_stages.push_back(BoundaryStageParams::init(c.channels, c.refine_layers, init));
  }
  p.text_projection = init.fan_in_uniform({c.text_dim, c.channels}, c.channels);
  return p;
}

ParamList BackboneParams::collect() const {
  ParamList out;
  spatial.collect(out, "spatial.");
  masf.collect(out, "masf.");
  input_head.collect(out, "input_head.");
  for (std::size_t l = 0; l < blocks.size(); ++l) blocks[l].collect(out, "block." + std::to_string(l) + ".");
  class_head.collect(out, "class_head.");
  boundary_head.collect(out, "boundary_head.");
  for (std::size_t s = 0; s < class_stages.size(); ++s) {
    class_stages[s].collect(out, "class_stage." + std::to_string(s) + ".");
  }
  for (std::size_t s = 0; s < boundary_stages.size(); ++s) {
    boundary_stages[s].collect(out, "boundary_stage." + std::to_string(s) + ".");
  }
  out.push_back({"text_projection", text_projection});
  return out;
}

Backbone::Backbone(BackboneConfig config, SkeletonGraph graph, std::uint64_t seed)
    : config_(std::move(config)), graph_(std::move(graph)) {
  config_.validate();
  graph_.validate();
  if (graph_.joints != config_.joints) throw ShapeError("graph joint count does not match the config");
  adjacency_ = multiscale_adjacency(graph_, config_.scales, config_.adjacency_eps);
  params_ = BackboneParams::init(config_, seed);
}

ForwardResult Backbone::forward(const Tensor& input) const {
  if (input.rank() != 3 || input.dim(0) != config_.in_channels || input.dim(2) != config_.joints) {
    throw ShapeError("expected " + std::to_string(config_.in_channels) + " x T x " +
                     std::to_string(config_.joints) + " input, got " + shape_str(input.shape()));
  }
  ForwardResult r;
  const Tensor local = multiscale_gcn(input, adjacency_, params_.spatial, config_.scales);
  r.spatial = dynamic_gcn(local, params_.spatial, graph_.text_graph, config_.bn_eps);
  r.filtered = config_.use_masf ? masf_forward(r.spatial, params_.masf) : r.spatial;

  Tensor temporal = spatial_channel_fusion(r.filtered, params_.input_head);
  for (const TemporalBlockParams& block : params_.blocks) {
    temporal = temporal_block(temporal, r.filtered, block, config_.use_facm);
  }
  r.representation = temporal;

  r.class_logits.push_back(params_.class_head(temporal));
  r.class_probs.push_back(softmax(r.class_logits.back(), 0));
  r.boundary_logits.push_back(params_.boundary_head(temporal));
  r.boundary_probs.push_back(sigmoid(r.boundary_logits.back()));
  Tensor context = temporal;
  for (const ClassStageParams& stage : params_.class_stages) {
    ClassStageOutput out = class_stage(r.class_probs.back(), context, stage);
    context = out.features;
    r.class_logits.push_back(out.logits);
    r.class_probs.push_back(out.probs);
  }
  for (const BoundaryStageParams& stage : params_.boundary_stages) {
    r.boundary_logits.push_back(boundary_stage(r.boundary_probs.back(), stage));
    r.boundary_probs.push_back(sigmoid(r.boundary_logits.back()));
  }
  return r;
}

std::vector<int> segment_classes(const SequenceTargets& targets) {
  if (targets.labels.empty()) throw ContractError("empty label sequence");
  std::vector<int> out{targets.labels.front()};
  for (std::size_t b : targets.boundaries) {
    if (b == 0 || b >= targets.labels.size()) throw BoundaryError("boundary outside (0, T)");
    out.push_back(targets.labels[b]);
  }
  return out;
}

LossBreakdown compute_losses(const ForwardResult& result, const Tensor& input, const SequenceTargets& targets,
                             const BackboneParams& params, const TextEmbeddings& embeddings,
                             const LossWeights& weights, const AadlConfig& aadl) {
  weights.validate();
  LossBreakdown out;
  const std::vector<double> similarity = gaussian_similarity(input, weights.sigma);
  std::vector<Tensor> seg;
  for (const Tensor& logits : result.class_logits) {
    seg.push_back(segmentation_loss(logits, targets.labels, similarity, weights.tau));
    out.segmentation += seg.back().item();
  }
  const std::vector<double> edges = boundary_targets(targets.labels.size(), targets.boundaries);
  std::vector<Tensor> bnd;
  for (const Tensor& logits : result.boundary_logits) {
    bnd.push_back(boundary_loss(logits, edges));
    out.boundary += bnd.back().item();
  }
  const Tensor contrastive = action_text_contrastive(result.representation, params.text_projection,
                                                     targets.boundaries, segment_classes(targets), embeddings);
  out.contrastive = contrastive.item();
  AadlResult discrepancy = adjacent_action_discrepancy(result.filtered, targets.boundaries, aadl);
  out.discrepancy = discrepancy.loss.item();
  out.adjacent_discrepancies = std::move(discrepancy.discrepancies);
  out.total = total_loss(seg, bnd, contrastive, discrepancy.loss, weights);
  return out;
}

}  // namespace scalpel
