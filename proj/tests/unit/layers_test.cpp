#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <random>

#include "scalpel/backbone/graph.hpp"
#include "scalpel/backbone/layers.hpp"
#include "scalpel/errors.hpp"
#include "scalpel/grad_check.hpp"
#include "scalpel/ops.hpp"
#include "support/random.hpp"

using namespace scalpel;
using testing_support::normal_tensor;

namespace {

void fill_normal(Tensor t, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  for (double& v : t.mutable_data()) v = normal(rng);
}

}  // namespace

TEST(MultiscaleGcn, SingleJointSingleScaleIsLinearPlusRelu) {
  std::mt19937_64 rng(1);
  Initializer init(1);
  SpatialParams p = SpatialParams::init(3, 5, 1, 1, 2, init);
  const Tensor x = normal_tensor(rng, {3, 7, 1});
  const Tensor out = multiscale_gcn(x, Tensor::ones({1, 1}), p, 1);
  const Tensor expected = relu(pointwise(p.gcn_weight, x));
  EXPECT_LE(max_abs_diff(out, expected), 1e-12);
}

TEST(MultiscaleGcn, ShapesAndBiasShapeCheck) {
  std::mt19937_64 rng(2);
  Initializer init(2);
  const SkeletonGraph g = SkeletonGraph::chain(4);
  SpatialParams p = SpatialParams::init(3, 6, 4, 2, 2, init);
  const Tensor a = multiscale_adjacency(g, 2, 1e-3);
  EXPECT_EQ(multiscale_gcn(normal_tensor(rng, {3, 9, 4}), a, p, 2).shape(), (Shape{6, 9, 4}));
  EXPECT_THROW(multiscale_gcn(normal_tensor(rng, {3, 9, 5}), a, p, 2), ShapeError);
}

TEST(DynamicGcn, TemporalGraphIsAntisymmetricWhenPEqualsQ) {
  std::mt19937_64 rng(3);
  const Tensor f = normal_tensor(rng, {4, 6, 5});
  const Tensor p = normal_tensor(rng, {2, 4});
  const Tensor g = temporal_graph(f, p, p);
  EXPECT_EQ(g.shape(), (Shape{6, 5, 5}));
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(g.at({t, i, j}), -g.at({t, j, i}), 1e-12);
  const Tensor gc = channel_graph(f, p, p);
  EXPECT_EQ(gc.shape(), (Shape{2, 5, 5}));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(gc.at({1, i, i}), 0.0, 1e-12);
}

TEST(DynamicGcn, ZeroGraphWeightPassesFeaturesThrough) {
  std::mt19937_64 rng(4);
  Initializer init(4);
  SpatialParams p = SpatialParams::init(3, 4, 5, 2, 2, init);
  for (double& v : p.graph_weight.mutable_data()) v = 0.0;
  const Tensor f = normal_tensor(rng, {4, 6, 5});
  EXPECT_LE(max_abs_diff(dynamic_gcn(f, p, Tensor(), 1e-5), f), 1e-12);
}

TEST(BatchNorm, NormalisesEachChannel) {
  std::mt19937_64 rng(5);
  const Tensor x = normal_tensor(rng, {3, 40, 2}, 4.0) + 7.0;
  const Tensor y = batch_norm(x, Tensor::ones({3, 1}), Tensor::zeros({3, 1}), 0.0);
  for (std::size_t c = 0; c < 3; ++c) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t t = 0; t < 40; ++t)
      for (std::size_t v = 0; v < 2; ++v) {
        s += y.at({c, t, v});
        s2 += y.at({c, t, v}) * y.at({c, t, v});
      }
    EXPECT_NEAR(s / 80.0, 0.0, 1e-12);
    EXPECT_NEAR(s2 / 80.0, 1.0, 1e-9);
  }
}

TEST(LinearTransformer, ZeroValueProjectionGivesRelu) {
  std::mt19937_64 rng(6);
  Initializer init(6);
  AttentionParams p = AttentionParams::init(5, 3, init);
  for (double& v : p.value.mutable_data()) v = 0.0;
  const Tensor f = normal_tensor(rng, {5, 12});
  EXPECT_LE(max_abs_diff(linear_transformer_block(f, p), relu(f)), 1e-15);
}

TEST(LinearTransformer, MatchesQuadraticFormula) {
  std::mt19937_64 rng(7);
  Initializer init(7);
  const AttentionParams p = AttentionParams::init(4, 3, init);
  const Tensor f = normal_tensor(rng, {4, 9});
  // Explicit T x T attention map: out = F + W_t V (sigmoid(K)^T sigmoid(Q)) / T.
  const Tensor q = sigmoid(pointwise(p.query, f));
  const Tensor k = sigmoid(pointwise(p.key, f));
  const Tensor v = pointwise(p.value, f);
  const Tensor map = matmul(transpose(k), q) * (1.0 / 9.0);
  const Tensor expected = relu(f + pointwise(p.output, matmul(v, map)));
  EXPECT_LE(max_abs_diff(linear_transformer_block(f, p), expected), 1e-12);
}

TEST(LinearTransformer, CostGrowsLinearlyInLength) {
  std::mt19937_64 rng(8);
  Initializer init(8);
  const AttentionParams p = AttentionParams::init(16, 8, init);
  NoGradGuard guard;
  auto time_for = [&](std::size_t T) {
    const Tensor f = normal_tensor(rng, {16, T});
    double best = 1e9;
    for (int rep = 0; rep < 5; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      const Tensor out = linear_transformer_block(f, p);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
  };
  const double t1 = time_for(4000);
  const double t2 = time_for(8000);
  EXPECT_LT(t2 / t1, 3.0);
}

TEST(Fusion, SpatialChannelFusionShape) {
  std::mt19937_64 rng(9);
  Initializer init(9);
  const FusionHeadParams p = FusionHeadParams::init(6, 4, 2, init);
  EXPECT_EQ(spatial_channel_fusion(normal_tensor(rng, {6, 10, 4}), p).shape(), (Shape{6, 10}));
}

TEST(Fusion, AdaptiveFusionWithZeroWeightsIsResidual) {
  std::mt19937_64 rng(10);
  const Tensor s = normal_tensor(rng, {3, 8});
  const Tensor t = normal_tensor(rng, {3, 8});
  EXPECT_LE(max_abs_diff(adaptive_fusion(s, t, Tensor::zeros({3, 6}), Tensor::zeros({3, 3})), t), 1e-15);
  EXPECT_THROW(adaptive_fusion(s, Tensor::zeros({3, 9}), Tensor::zeros({3, 6}), Tensor::zeros({3, 3})),
               ShapeError);
}

TEST(Stages, BoundaryStageReturnsLogitsOfRightShape) {
  std::mt19937_64 rng(11);
  Initializer init(11);
  const BoundaryStageParams p = BoundaryStageParams::init(6, 3, init);
  const Tensor probs = sigmoid(normal_tensor(rng, {1, 20}));
  EXPECT_EQ(boundary_stage(probs, p).shape(), (Shape{1, 20}));
}

TEST(Stages, ClassStageProbabilitiesSumToOne) {
  std::mt19937_64 rng(12);
  Initializer init(12);
  const ClassStageParams p = ClassStageParams::init(3, 6, 4, 2, init);
  const Tensor prev = softmax(normal_tensor(rng, {3, 15}), 0);
  const ClassStageOutput out = class_stage(prev, normal_tensor(rng, {6, 15}), p);
  EXPECT_EQ(out.logits.shape(), (Shape{3, 15}));
  EXPECT_LE(max_abs_diff(out.probs, softmax(out.logits, 0)), 1e-15);
}

TEST(Stages, DilatedResidualWithZeroMixIsIdentity) {
  std::mt19937_64 rng(13);
  const Tensor x = normal_tensor(rng, {4, 12});
  const DilatedLayerParams p{normal_tensor(rng, {4, 12}), Tensor::zeros({4, 4})};
  EXPECT_LE(max_abs_diff(dilated_residual(x, p, 2), x), 1e-15);
}

TEST(Layers, SpatialGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(14);
  Initializer init(14);
  SpatialParams p = SpatialParams::init(2, 3, 4, 2, 2, init);
  fill_normal(p.adjacency_bias, rng, 0.1);
  const Tensor a = multiscale_adjacency(SkeletonGraph::chain(4), 2, 1e-3);
  const Tensor x = normal_tensor(rng, {2, 6, 4});
  const Tensor probe = normal_tensor(rng, {3, 6, 4});
  ParamList params;
  p.collect(params, "spatial.");
  const auto r = grad_check(
      "spatial", [&] { return sum(dynamic_gcn(multiscale_gcn(x, a, p, 2), p, Tensor(), 1e-5) * probe); }, params);
  EXPECT_TRUE(r.passed(1e-4)) << r.max_rel_error << " skipped " << r.coordinates_skipped;
}

TEST(Layers, TemporalBlockGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(15);
  Initializer init(15);
  TemporalBlockParams p = TemporalBlockParams::init(4, 3, 3, 2, init);
  fill_normal(p.facm.mix_first, rng, 0.5);
  const Tensor f = normal_tensor(rng, {4, 10});
  const Tensor s = normal_tensor(rng, {4, 10, 3});
  const Tensor probe = normal_tensor(rng, {4, 10});
  ParamList params;
  p.collect(params, "block.");
  const auto r = grad_check("temporal_block", [&] { return sum(temporal_block(f, s, p, true) * probe); }, params);
  EXPECT_TRUE(r.passed(1e-4)) << r.max_rel_error << " skipped " << r.coordinates_skipped;
}
