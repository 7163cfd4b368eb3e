#include <gtest/gtest.h>

#include <random>

#include "scalpel/backbone/model.hpp"
#include "scalpel/errors.hpp"
#include "scalpel/harness/config.hpp"
#include "scalpel/harness/gradcheck_suite.hpp"
#include "scalpel/ops.hpp"
#include "support/random.hpp"

using namespace scalpel;
using testing_support::normal_tensor;

namespace {

Backbone miniature(bool masf = true, bool facm = true, std::uint64_t seed = 3) {
  BackboneConfig c = miniature_config();
  c.use_masf = masf;
  c.use_facm = facm;
  return Backbone(c, SkeletonGraph::chain(c.joints), seed);
}

}  // namespace

TEST(Backbone, OutputShapesAndRanges) {
  const Backbone model = miniature();
  std::mt19937_64 rng(1);
  const ForwardResult r = model.forward(normal_tensor(rng, {2, 32, 4}));
  const BackboneConfig& c = model.config();
  EXPECT_EQ(r.spatial.shape(), (Shape{c.channels, 32, c.joints}));
  EXPECT_EQ(r.filtered.shape(), r.spatial.shape());
  EXPECT_EQ(r.representation.shape(), (Shape{c.channels, 32}));
  ASSERT_EQ(r.class_probs.size(), c.class_stages + 1);
  ASSERT_EQ(r.boundary_probs.size(), c.boundary_stages + 1);
  for (const Tensor& p : r.class_probs) {
    ASSERT_EQ(p.shape(), (Shape{c.classes, 32}));
    for (std::size_t t = 0; t < 32; ++t) {
      double total = 0.0;
      for (std::size_t q = 0; q < c.classes; ++q) total += p.at({q, t});
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
  for (const Tensor& b : r.boundary_probs) {
    ASSERT_EQ(b.shape(), (Shape{1, 32}));
    for (double v : b.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Backbone, SpectralModulesAreNoOpsAtInit) {
  std::mt19937_64 rng(2);
  const Tensor x = normal_tensor(rng, {2, 40, 4});
  const ForwardResult full = miniature(true, true).forward(x);
  const ForwardResult bare = miniature(false, false).forward(x);
  EXPECT_LE(max_abs_diff(full.filtered, bare.filtered), 1e-9);
  for (std::size_t s = 0; s < full.class_logits.size(); ++s)
    EXPECT_LE(max_abs_diff(full.class_logits[s], bare.class_logits[s]), 1e-9);
  for (std::size_t s = 0; s < full.boundary_logits.size(); ++s)
    EXPECT_LE(max_abs_diff(full.boundary_logits[s], bare.boundary_logits[s]), 1e-9);
}

TEST(Backbone, SeedDeterminesParameters) {
  const ParamList a = miniature(true, true, 5).parameters();
  const ParamList b = miniature(true, true, 5).parameters();
  const ParamList c = miniature(true, true, 6).parameters();
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].tensor.values(), b[i].tensor.values());
    differs = differs || a[i].tensor.values() != c[i].tensor.values();
  }
  EXPECT_TRUE(differs);
}

TEST(Backbone, RejectsWrongInputAndGraph) {
  const Backbone model = miniature();
  EXPECT_THROW(model.forward(Tensor::zeros({2, 16, 5})), ShapeError);
  EXPECT_THROW(model.forward(Tensor::zeros({3, 16, 4})), ShapeError);
  EXPECT_THROW(Backbone(miniature_config(), SkeletonGraph::chain(5), 0), ShapeError);
  BackboneConfig bad = miniature_config();
  bad.masf.max_filter_length = 9;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Backbone, LossesAreFiniteAndBackpropagate) {
  const Backbone model = miniature();
  std::mt19937_64 rng(4);
  const Tensor x = normal_tensor(rng, {2, 32, 4});
  std::vector<int> labels(32, 0);
  for (std::size_t t = 10; t < 22; ++t) labels[t] = 1;
  for (std::size_t t = 22; t < 32; ++t) labels[t] = 2;
  const SequenceTargets targets{labels, {10, 22}};
  EXPECT_EQ(segment_classes(targets), (std::vector<int>{0, 1, 2}));
  const TextEmbeddings emb = random_embeddings(3, model.config().text_dim, 1);
  const LossBreakdown l = compute_losses(model.forward(x), x, targets, model.params(), emb, LossWeights{},
                                         AadlConfig{8, 100.0});
  EXPECT_TRUE(std::isfinite(l.total.item()));
  EXPECT_EQ(l.adjacent_discrepancies.size(), 2u);
  l.total.backward();
  double norm = 0.0;
  for (const NamedTensor& p : model.parameters())
    for (double g : p.tensor.grad()) norm += g * g;
  EXPECT_GT(norm, 0.0);
}
