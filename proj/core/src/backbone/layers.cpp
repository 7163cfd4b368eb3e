#include "scalpel/backbone/layers.hpp"

#include "scalpel/errors.hpp"
#include "scalpel/ops.hpp"

namespace scalpel {

namespace {

void require_rank(const Tensor& x, std::size_t rank, const char* what) {
  if (x.rank() != rank) throw ShapeError(std::string(what) + ": unexpected shape " + shape_str(x.shape()));
}

}  // namespace

SpatialParams SpatialParams::init(std::size_t in_channels, std::size_t channels, std::size_t joints,
                                  std::size_t scales, std::size_t graph_channels, Initializer& init) {
  SpatialParams p;
  p.adjacency_bias = init.zeros({joints, scales * joints});
  p.gcn_weight = init.fan_in_uniform({channels, scales * in_channels}, scales * in_channels);
  p.p_temporal = init.fan_in_uniform({graph_channels, channels}, channels);
  p.q_temporal = init.fan_in_uniform({graph_channels, channels}, channels);
  p.p_channel = init.fan_in_uniform({graph_channels, channels}, channels);
  p.q_channel = init.fan_in_uniform({graph_channels, channels}, channels);
  p.channel_expand = init.fan_in_uniform({channels, graph_channels}, graph_channels);
  p.graph_weight = init.fan_in_uniform({channels, channels}, channels);
  p.bn_scale = init.ones({channels, 1});
  p.bn_shift = init.zeros({channels, 1});
  return p;
}

void SpatialParams::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + "adjacency_bias", adjacency_bias});
  out.push_back({prefix + "gcn_weight", gcn_weight});
  out.push_back({prefix + "p_temporal", p_temporal});
  out.push_back({prefix + "q_temporal", q_temporal});
  out.push_back({prefix + "p_channel", p_channel});
  out.push_back({prefix + "q_channel", q_channel});
  out.push_back({prefix + "channel_expand", channel_expand});
  out.push_back({prefix + "graph_weight", graph_weight});
  out.push_back({prefix + "bn_scale", bn_scale});
  out.push_back({prefix + "bn_shift", bn_shift});
}

Tensor multiscale_gcn(const Tensor& input, const Tensor& adjacency, const SpatialParams& params,
                      std::size_t scales) {
  require_rank(input, 3, "multiscale_gcn input");
  const std::size_t C0 = input.dim(0), T = input.dim(1), V = input.dim(2);
  if (adjacency.shape() != Shape{V, scales * V} || params.adjacency_bias.shape() != adjacency.shape()) {
    throw ShapeError("multi-scale adjacency must be V x KV with V = " + std::to_string(V));
  }
  if (params.gcn_weight.rank() != 2 || params.gcn_weight.dim(1) != scales * C0) {
    throw ShapeError("W_s0 must have K*C0 = " + std::to_string(scales * C0) + " columns");
  }
  Tensor mixed = matmul(input, adjacency + params.adjacency_bias);  // C0 x T x KV
  mixed = permute(reshape(mixed, {C0, T, scales, V}), {2, 0, 1, 3});
  mixed = reshape(mixed, {scales * C0, T, V});
  return relu(pointwise(params.gcn_weight, mixed));
}

Tensor batch_norm(const Tensor& x, const Tensor& scale, const Tensor& shift, double eps) {
  const std::size_t C = x.dim(0);
  if (scale.shape() != Shape{C, 1} || shift.shape() != Shape{C, 1}) throw ShapeError("BN affine must be C x 1");
  const Tensor flat = reshape(x, {C, x.numel() / C});
  const Tensor centered = flat - mean(flat, 1, true);
  const Tensor var = mean(square(centered), 1, true);
  const Tensor normalized = centered / sqrt(var + eps);
  return reshape(normalized * scale + shift, x.shape());
}

Tensor temporal_graph(const Tensor& features, const Tensor& p, const Tensor& q) {
  const std::size_t T = features.dim(1), V = features.dim(2);
  const Tensor pooled_p = mean(pointwise(p, features), 0);  // T x V
  const Tensor pooled_q = mean(pointwise(q, features), 0);
  return reshape(pooled_p, {T, V, 1}) - reshape(pooled_q, {T, 1, V});
}

Tensor channel_graph(const Tensor& features, const Tensor& p, const Tensor& q) {
  const std::size_t C1 = p.dim(0), V = features.dim(2);
  const Tensor pooled_p = mean(pointwise(p, features), 1);  // C1 x V
  const Tensor pooled_q = mean(pointwise(q, features), 1);
  return reshape(pooled_p, {C1, V, 1}) - reshape(pooled_q, {C1, 1, V});
}

Tensor dynamic_gcn(const Tensor& features, const SpatialParams& params, const Tensor& text_graph,
                   double bn_eps) {
  require_rank(features, 3, "dynamic_gcn input");
  const std::size_t C = features.dim(0), T = features.dim(1), V = features.dim(2);
  const std::size_t C1 = params.p_channel.dim(0);

  Tensor g_time = temporal_graph(features, params.p_temporal, params.q_temporal);
  Tensor g_channel = channel_graph(features, params.p_channel, params.q_channel);
  if (text_graph.defined()) {
    if (text_graph.shape() != Shape{V, V}) throw ShapeError("text graph must be V x V");
    g_time = g_time + text_graph;
    g_channel = g_channel + text_graph;
  }
  g_channel = reshape(pointwise(params.channel_expand, reshape(g_channel, {C1, V * V})), {C, V, V});

  const Tensor lifted = pointwise(params.graph_weight, features);  // F_s1
  const Tensor time_term = reshape(matmul(reshape(lifted, {C, T, 1, V}), g_time), {C, T, V});
  const Tensor channel_term = matmul(lifted, g_channel);
  return relu(batch_norm(time_term + channel_term, params.bn_scale, params.bn_shift, bn_eps)) + features;
}

AttentionParams AttentionParams::init(std::size_t channels, std::size_t attention_channels, Initializer& init) {
  AttentionParams p;
  p.query = init.fan_in_uniform({attention_channels, channels}, channels);
  p.key = init.fan_in_uniform({attention_channels, channels}, channels);
  p.value = init.fan_in_uniform({attention_channels, channels}, channels);
  p.output = init.fan_in_uniform({channels, attention_channels}, attention_channels);
  return p;
}

void AttentionParams::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + "query", query});
  out.push_back({prefix + "key", key});
  out.push_back({prefix + "value", value});
  out.push_back({prefix + "output", output});
}

Tensor linear_transformer_block(const Tensor& features, const AttentionParams& params, const Tensor& context) {
  require_rank(features, 2, "linear transformer input");
  const Tensor& source = context.defined() ? context : features;
  if (source.shape() != features.shape()) throw ShapeError("cross-attention context must match C x T");
  const double T = static_cast<double>(features.dim(1));
  const Tensor q = sigmoid(pointwise(params.query, features));
  const Tensor k = sigmoid(pointwise(params.key, features));
  const Tensor v = pointwise(params.value, source);
  // (V K^T) Q keeps the cost linear in T: the C2 x C2 summary is built once.
  const Tensor summary = matmul(v, transpose(k)) * (1.0 / T);
  return relu(features + pointwise(params.output, matmul(summary, q)));
}

FusionHeadParams FusionHeadParams::init(std::size_t channels, std::size_t joints, std::size_t fusion_channels,
                                        Initializer& init) {
  FusionHeadParams p;
  p.reduce = init.fan_in_uniform({fusion_channels, channels}, channels);
  p.merge = init.fan_in_uniform({channels, joints * fusion_channels}, joints * fusion_channels);
  return p;
}

void FusionHeadParams::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + "reduce", reduce});
  out.push_back({prefix + "merge", merge});
}

Tensor spatial_channel_fusion(const Tensor& features, const FusionHeadParams& params) {
  require_rank(features, 3, "spatial-channel fusion input");
  const std::size_t T = features.dim(1), V = features.dim(2);
  const std::size_t C3 = params.reduce.dim(0);
  if (params.merge.dim(1) != V * C3) throw ShapeError("fusion merge weight must have V*C3 columns");
  const Tensor reduced = pointwise(params.reduce, features);  // C3 x T x V
  const Tensor folded = reshape(permute(reduced, {2, 0, 1}), {V * C3, T});
  return pointwise(params.merge, folded);
}

Tensor adaptive_fusion(const Tensor& spatial, const Tensor& temporal, const Tensor& fuse_weight,
                       const Tensor& lift_weight) {
  if (spatial.shape() != temporal.shape()) throw ShapeError("adaptive fusion inputs must share a shape");
  const Tensor stacked = concat({spatial, temporal}, 0);
  return gelu(pointwise(lift_weight, pointwise(fuse_weight, stacked))) + temporal;
}

TemporalBlockParams TemporalBlockParams::init(std::size_t channels, std::size_t joints,
                                              std::size_t attention_channels, std::size_t fusion_channels,
                                              Initializer& init) {
  TemporalBlockParams p;
  p.attention = AttentionParams::init(channels, attention_channels, init);
  p.facm = FacmParams::identity(channels);
  p.head = FusionHeadParams::init(channels, joints, fusion_channels, init);
  p.fuse_weight = init.fan_in_uniform({channels, 2 * channels}, 2 * channels);
  p.lift_weight = init.fan_in_uniform({channels, channels}, channels);
  return p;
}

void TemporalBlockParams::collect(ParamList& out, const std::string& prefix) const {
  attention.collect(out, prefix + "attention.");
  facm.collect(out, prefix + "facm.");
  head.collect(out, prefix + "head.");
  out.push_back({prefix + "fuse_weight", fuse_weight});
  out.push_back({prefix + "lift_weight", lift_weight});
}

Tensor temporal_block(const Tensor& features, const Tensor& spatial, const TemporalBlockParams& params,
                      bool use_facm) {
  const Tensor attended = linear_transformer_block(features, params.attention);
  const Tensor mixed = use_facm ? facm_forward(attended, params.facm) : attended;
  const Tensor head = spatial_channel_fusion(spatial, params.head);
  return adaptive_fusion(head, mixed, params.fuse_weight, params.lift_weight);
}

HeadParams HeadParams::init(std::size_t outputs, std::size_t channels, Initializer& init) {
  return HeadParams{init.fan_in_uniform({outputs, channels}, channels), init.zeros({outputs, 1})};
}

void HeadParams::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + "weight", weight});
  out.push_back({prefix + "bias", bias});
}

Tensor HeadParams::operator()(const Tensor& features) const { return pointwise(weight, features) + bias; }

ClassStageParams ClassStageParams::init(std::size_t classes, std::size_t channels,
                                        std::size_t attention_channels, std::size_t layers, Initializer& init) {
  ClassStageParams p;
  p.input = init.fan_in_uniform({channels, classes}, classes);
  for (std::size_t i = 0; i < layers; ++i) p.layers.push_back(AttentionParams::init(channels, attention_channels, init));
  p.head = HeadParams::init(classes, channels, init);
  return p;
}

void ClassStageParams::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + "input", input});
  for (std::size_t i = 0; i < layers.size(); ++i) layers[i].collect(out, prefix + "layer." + std::to_string(i) + ".");
  head.collect(out, prefix + "head.");
}

ClassStageOutput class_stage(const Tensor& previous_probs, const Tensor& context, const ClassStageParams& params) {
  Tensor x = pointwise(params.input, previous_probs);
  for (const AttentionParams& layer : params.layers) x = linear_transformer_block(x, layer, context);
  Tensor logits = params.head(x);
  Tensor probs = softmax(logits, 0);
  return {x, logits, probs};
}

BoundaryStageParams BoundaryStageParams::init(std::size_t channels, std::size_t layers, Initializer& init) {
  BoundaryStageParams p;
  p.input = init.fan_in_uniform({channels, 1}, 1);
  for (std::size_t i = 0; i < layers; ++i) {
    DilatedLayerParams layer;
    layer.dilated = init.fan_in_uniform({channels, 3 * channels}, 3 * channels);
    layer.mix = init.fan_in_uniform({channels, channels}, channels);
    p.layers.push_back(layer);
  }
  p.head = HeadParams::init(1, channels, init);
  return p;
}

void BoundaryStageParams::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + "input", input});
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string name = prefix + "layer." + std::to_string(i) + ".";
    out.push_back({name + "dilated", layers[i].dilated});
    out.push_back({name + "mix", layers[i].mix});
  }
  head.collect(out, prefix + "head.");
}

Tensor dilated_residual(const Tensor& features, const DilatedLayerParams& params, std::size_t dilation) {
  const long d = static_cast<long>(dilation);
  const Tensor taps = concat({time_shift(features, 1, d), features, time_shift(features, 1, -d)}, 0);
  return features + pointwise(params.mix, relu(pointwise(params.dilated, taps)));
}

Tensor boundary_stage(const Tensor& previous_probs, const BoundaryStageParams& params) {
  Tensor x = pointwise(params.input, previous_probs);
  std::size_t dilation = 1;
  for (const DilatedLayerParams& layer : params.layers) {
    x = dilated_residual(x, layer, dilation);
    dilation *= 2;
  }
  return params.head(x);
}

}  // namespace scalpel
