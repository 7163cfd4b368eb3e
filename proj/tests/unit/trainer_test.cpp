#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "scalpel/errors.hpp"
#include "scalpel/harness/checkpoint.hpp"
#include "scalpel/harness/gradcheck_suite.hpp"
#include "scalpel/harness/synthetic.hpp"
#include "scalpel/harness/trainer.hpp"
#include "support/temp_dir.hpp"

using namespace scalpel;
using testing_support::TempDir;

namespace {

Dataset small_dataset(std::size_t sequences = 6) {
  DatasetSpec spec;
  spec.classes = {{"slow", {{2.0, 1.0, 0.0}}}, {"fast", {{8.0, 1.0, 0.0}}}};
  spec.sequences = sequences;
  spec.frames = 48;
  spec.segments_per_sequence = 3;
  spec.channels = 2;
  spec.joints = 4;
  spec.noise = 0.1;
  spec.seed = 3;
  return gen_dataset(spec);
}

ExperimentConfig small_config(std::size_t epochs) {
  ExperimentConfig c;
  c.model = miniature_config();
  c.model.classes = 0;
  c.graph = "chain";
  c.epochs = epochs;
  c.batch_size = 2;
  c.learning_rate = 0.01;
  c.aadl = AadlConfig{8, 1.0};
  return c;
}

std::vector<const SkeletonSequence*> pointers(const Dataset& d) {
  std::vector<const SkeletonSequence*> out;
  for (const auto& s : d.sequences) out.push_back(&s);
  return out;
}

}  // namespace

TEST(Split, DeterministicDisjointAndComplete) {
  const Dataset d = small_dataset(10);
  const DatasetSplit a = split_dataset(d, 0.8, 4);
  const DatasetSplit b = split_dataset(d, 0.8, 4);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.train.size(), 8u);
  EXPECT_EQ(a.eval.size(), 2u);
  std::set<std::size_t> all(a.train.begin(), a.train.end());
  all.insert(a.eval.begin(), a.eval.end());
  EXPECT_EQ(all.size(), 10u);
  const DatasetSplit extreme = split_dataset(d, 1.0, 4);
  EXPECT_EQ(extreme.eval.size(), 1u);
}

TEST(Trainer, ZeroEpochsLeavesInitialParameters) {
  const Dataset d = small_dataset();
  const ExperimentConfig c = small_config(0);
  const TrainResult r = train(c, d);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.config.model.classes, 2u);
  const Backbone fresh(r.config.model, build_graph(r.config), r.config.seed);
  const ParamList a = r.model.parameters(), b = fresh.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].tensor.values(), b[i].tensor.values()) << a[i].name;
}

TEST(Trainer, SpectralModulesDoNotChangeInitialLoss) {
  const Dataset d = small_dataset();
  ExperimentConfig c = resolve_config(small_config(1), d);
  const TextEmbeddings emb = embeddings_for(c, d.class_names);
  const SkeletonSequence& seq = d.sequences[0];
  const SequenceTargets targets = targets_of(seq);
  auto loss_with = [&](bool enabled) {
    BackboneConfig m = c.model;
    m.use_masf = enabled;
    m.use_facm = enabled;
    const Backbone model(m, build_graph(c), c.seed);
    return compute_losses(model.forward(seq.data), seq.data, targets, model.params(), emb, c.loss, c.aadl)
        .total.item();
  };
  EXPECT_NEAR(loss_with(true), loss_with(false), 1e-9);
}

TEST(Trainer, TrainingIsDeterministic) {
  const Dataset d = small_dataset();
  const TrainResult a = train(small_config(2), d);
  const TrainResult b = train(small_config(2), d);
  ASSERT_EQ(a.log.size(), 2u);
  for (std::size_t e = 0; e < 2; ++e) {
    EXPECT_EQ(a.log[e].total, b.log[e].total);
    EXPECT_TRUE(std::isfinite(a.log[e].total));
    EXPECT_TRUE(a.log[e].has_heldout);
  }
  const ParamList pa = a.model.parameters(), pb = b.model.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i].tensor.values(), pb[i].tensor.values());
}

TEST(Trainer, NonFiniteInputStopsWithDump) {
  TempDir dir;
  Dataset d = small_dataset();
  for (auto& s : d.sequences) s.data.mutable_data()[5] = std::numeric_limits<double>::quiet_NaN();
  TrainOptions o;
  o.dump_dir = dir.path();
  EXPECT_THROW(train(small_config(1), d, o), NumericalError);
  EXPECT_TRUE(std::filesystem::exists(dir / "nan_dump.json"));
}

TEST(Evaluate, GroundTruthScoresPerfectly) {
  const Dataset d = small_dataset();
  std::vector<std::vector<int>> predictions;
  for (const auto& s : d.sequences) predictions.push_back(s.labels);
  const EvaluationReport r = evaluate_predictions(predictions, pointers(d));
  EXPECT_DOUBLE_EQ(r.aggregate.acc, 100.0);
  EXPECT_DOUBLE_EQ(r.aggregate.edit, 100.0);
  EXPECT_DOUBLE_EQ(r.aggregate.f1_50, 100.0);
}

TEST(Evaluate, AccuracyIsFrameWeighted) {
  Dataset d = small_dataset(2);
  SkeletonSequence longer = d.sequences[1];
  longer.id = "longer";
  std::vector<const SkeletonSequence*> seqs{&d.sequences[0], &d.sequences[1]};
  std::vector<std::vector<int>> predictions{d.sequences[0].labels, std::vector<int>(48, 7)};
  const EvaluationReport r = evaluate_predictions(predictions, seqs);
  EXPECT_DOUBLE_EQ(r.aggregate.acc, 50.0);
  EXPECT_DOUBLE_EQ(r.aggregate.edit, 0.5 * (100.0 + r.sequences[1].metrics.edit));
}

TEST(Evaluate, ModelEvaluationIsRepeatable) {
  const Dataset d = small_dataset();
  const TrainResult r = train(small_config(0), d);
  const auto a = evaluate(r.model, pointers(d), r.config.postprocess);
  const auto b = evaluate(r.model, pointers(d), r.config.postprocess);
  for (std::size_t i = 0; i < a.sequences.size(); ++i) EXPECT_EQ(a.sequences[i].prediction, b.sequences[i].prediction);
}

TEST(Evaluate, CsvLayout) {
  TempDir dir;
  const Dataset d = small_dataset(2);
  std::vector<std::vector<int>> predictions;
  for (const auto& s : d.sequences) predictions.push_back(s.labels);
  write_evaluation_csv(dir / "eval.csv", "toy", "eval", "run1", evaluate_predictions(predictions, pointers(d)));
  std::ifstream in(dir / "eval.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "dataset,split,run,acc,edit,f1_10,f1_25,f1_50");
  EXPECT_EQ(row, "toy,eval,run1,100.0,100.0,100.0,100.0,100.0");
  EXPECT_TRUE(std::filesystem::exists(dir / "eval_sequences.csv"));
}
