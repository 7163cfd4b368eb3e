#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "scalpel/backbone/model.hpp"
#include "scalpel/harness/config.hpp"
#include "scalpel/harness/sequence.hpp"
#include "scalpel/metrics.hpp"

namespace scalpel {

/// Deterministic split: sequences are ranked by a 64-bit FNV-1a hash of
/// (seed, id) and the first floor(fraction * N) go to training. With N >= 2
/// both sides keep at least one sequence.
struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> eval;
};

DatasetSplit split_dataset(const Dataset& dataset, double train_fraction, std::uint64_t seed);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double total = 0.0;     // means over the epoch's training sequences
  double segmentation = 0.0;
  double boundary = 0.0;
  double contrastive = 0.0;
  double discrepancy = 0.0;
  double mean_adjacent_discrepancy = 0.0;
  bool has_heldout = false;
  MetricReport heldout;
};

struct TrainOptions {
  /// Receives the NaN diagnostic dump; may be empty.
  std::filesystem::path dump_dir;
  /// Skip the per-epoch held-out evaluation.
  bool skip_heldout = false;
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainResult {
  Backbone model;
  std::vector<EpochLog> log;
  DatasetSplit split;
  std::vector<std::string> class_names;
  ExperimentConfig config;  // with the class count resolved
};

/// Builds the model for `dataset`: fills `classes` when the config leaves it 0
/// and checks the dataset fits.
ExperimentConfig resolve_config(ExperimentConfig config, const Dataset& dataset);

/// Embeddings named by the config, or seeded random vectors when none are given.
TextEmbeddings embeddings_for(const ExperimentConfig& config, const std::vector<std::string>& class_names);

/// Adam over the total loss. Throws NumericalError (after writing
/// `nan_dump.json` into `dump_dir` when set) if a loss turns non-finite.
TrainResult train(const ExperimentConfig& config, const Dataset& dataset, const TrainOptions& options = {});

struct SequenceReport {
  std::string id;
  std::size_t frames = 0;
  MetricReport metrics;
  std::vector<int> prediction;
};

/// Acc is frame weighted over all sequences; Edit and F1 are per-sequence means.
struct EvaluationReport {
  std::vector<SequenceReport> sequences;
  MetricReport aggregate;
};

SequenceTargets targets_of(const SkeletonSequence& seq);

/// Final-stage predictions after boundary-guided post-processing.
std::vector<int> predict(const Backbone& model, const SkeletonSequence& seq, const PostprocessOptions& options);

EvaluationReport evaluate(const Backbone& model, const std::vector<const SkeletonSequence*>& sequences,
                          const PostprocessOptions& options);
EvaluationReport evaluate_predictions(const std::vector<std::vector<int>>& predictions,
                                      const std::vector<const SkeletonSequence*>& sequences);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& dataset, const std::string& split, const std::string& run,
                            const MetricReport& report);
/// Writes the aggregate row to `path` and one row per sequence to
/// `<stem>_sequences.csv` next to it.
void write_evaluation_csv(const std::filesystem::path& path, const std::string& dataset, const std::string& split,
                          const std::string& run, const EvaluationReport& report);
void write_epoch_log(const std::filesystem::path& path, const std::vector<EpochLog>& log);

}  // namespace scalpel
