#include "scalpel/harness/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "scalpel/errors.hpp"
#include "scalpel/harness/optimizer.hpp"
#include "scalpel/ops.hpp"

namespace scalpel {

namespace {

std::uint64_t fnv1a(std::uint64_t seed, const std::string& id) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
  for (char c : id) mix(static_cast<unsigned char>(c));
  return h;
}

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace

DatasetSplit split_dataset(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
  const std::size_t n = dataset.sequences.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fnv1a(seed, dataset.sequences[a].id) < fnv1a(seed, dataset.sequences[b].id);
  });
  auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
  if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  if (n == 1) n_train = 1;
  DatasetSplit s;
  s.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
  s.eval.assign(order.begin() + static_cast<long>(n_train), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.eval.begin(), s.eval.end());
  return s;
}

ExperimentConfig resolve_config(ExperimentConfig config, const Dataset& dataset) {
  if (dataset.sequences.empty()) throw ContractError("dataset is empty");
  int max_label = 0;
  for (const SkeletonSequence& s : dataset.sequences) {
    for (int l : s.labels) max_label = std::max(max_label, l);
  }
  const std::size_t needed = std::max(dataset.class_names.size(), static_cast<std::size_t>(max_label) + 1);
  if (config.model.classes == 0) config.model.classes = needed;
  if (config.model.classes < needed) {
    throw ConfigError("config has " + std::to_string(config.model.classes) + " classes, dataset needs " +
                      std::to_string(needed));
  }
  config.validate();
  return config;
}

TextEmbeddings embeddings_for(const ExperimentConfig& config, const std::vector<std::string>& class_names) {
  if (!config.embeddings_path.empty()) return load_embeddings(config.embeddings_path, class_names, config.model.text_dim);
  return random_embeddings(std::max(class_names.size(), config.model.classes), config.model.text_dim,
                           config.seed ^ 0x5eedf00dull);
}

SequenceTargets targets_of(const SkeletonSequence& seq) { return {seq.labels, seq.boundaries}; }

TrainResult train(const ExperimentConfig& raw_config, const Dataset& dataset, const TrainOptions& options) {
  const ExperimentConfig config = resolve_config(raw_config, dataset);
  std::vector<std::string> class_names = dataset.class_names;
  for (std::size_t c = class_names.size(); c < config.model.classes; ++c) class_names.push_back("class_" + std::to_string(c));

  TrainResult result{Backbone(config.model, build_graph(config), config.seed), {}, {}, class_names, config};
  result.split = split_dataset(dataset, config.train_fraction, config.seed);
  const TextEmbeddings embeddings = embeddings_for(config, class_names);

  std::vector<const SkeletonSequence*> heldout;
  for (std::size_t i : result.split.eval) heldout.push_back(&dataset.sequences[i]);

  Adam adam(result.model.parameters(), AdamConfig{config.learning_rate});
  std::mt19937_64 shuffle_rng(config.seed + 1);
  std::vector<std::size_t> order = result.split.train;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochLog log;
    log.epoch = epoch;
    std::size_t pairs = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      adam.zero_grad();
      for (std::size_t b = start; b < end; ++b) {
        const SkeletonSequence& seq = dataset.sequences[order[b]];
        const ForwardResult fwd = result.model.forward(seq.data);
        const LossBreakdown loss = compute_losses(fwd, seq.data, targets_of(seq), result.model.params(), embeddings,
                                                  config.loss, config.aadl);
        const double total = loss.total.item();
        if (!std::isfinite(total)) {
          nlohmann::json dump = {{"epoch", epoch},
                                 {"sequence", seq.id},
                                 {"total", std::to_string(total)},
                                 {"segmentation", std::to_string(loss.segmentation)},
                                 {"boundary", std::to_string(loss.boundary)},
                                 {"contrastive", std::to_string(loss.contrastive)},
                                 {"discrepancy", std::to_string(loss.discrepancy)},
                                 {"batch", nlohmann::json::array()}};
          for (std::size_t k = start; k < end; ++k) dump["batch"].push_back(dataset.sequences[order[k]].id);
          if (!options.dump_dir.empty()) {
            std::ofstream(options.dump_dir / "nan_dump.json") << dump.dump(2) << '\n';
          }
          throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + " on sequence " + seq.id);
        }
        (loss.total * scale).backward();
        log.total += total;
        log.segmentation += loss.segmentation;
        log.boundary += loss.boundary;
        log.contrastive += loss.contrastive;
        log.discrepancy += loss.discrepancy;
        for (double d : loss.adjacent_discrepancies) log.mean_adjacent_discrepancy += d;
        pairs += loss.adjacent_discrepancies.size();
      }
      adam.step();
    }
    const double n = static_cast<double>(std::max<std::size_t>(order.size(), 1));
    log.total /= n;
    log.segmentation /= n;
    log.boundary /= n;
    log.contrastive /= n;
    log.discrepancy /= n;
    if (pairs) log.mean_adjacent_discrepancy /= static_cast<double>(pairs);
    if (!options.skip_heldout && !heldout.empty()) {
      log.heldout = evaluate(result.model, heldout, config.postprocess).aggregate;
      log.has_heldout = true;
    }
    spdlog::info("epoch {:>4}  loss {:.5f}  seg {:.5f}  bnd {:.5f}  txt {:.5f}  aadl {:.5f}  acc {:.1f}", epoch,
                 log.total, log.segmentation, log.boundary, log.contrastive, log.discrepancy, log.heldout.acc);
    if (options.on_epoch) options.on_epoch(log);
    result.log.push_back(log);
  }
  return result;
}

std::vector<int> predict(const Backbone& model, const SkeletonSequence& seq, const PostprocessOptions& options) {
  NoGradGuard guard;
  const ForwardResult fwd = model.forward(seq.data);
  return asrf_postprocess(fwd.class_probs.back(), fwd.boundary_probs.back(), options);
}

EvaluationReport evaluate_predictions(const std::vector<std::vector<int>>& predictions,
                                      const std::vector<const SkeletonSequence*>& sequences) {
  if (predictions.size() != sequences.size()) throw ContractError("one prediction per sequence is required");
  EvaluationReport report;
  std::size_t frames = 0, correct = 0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const SkeletonSequence& seq = *sequences[i];
    SequenceReport r{seq.id, seq.frames(), segment_metrics(predictions[i], seq.labels), predictions[i]};
    for (std::size_t t = 0; t < seq.labels.size(); ++t) correct += predictions[i][t] == seq.labels[t];
    frames += seq.labels.size();
    report.aggregate.edit += r.metrics.edit;
    report.aggregate.f1_10 += r.metrics.f1_10;
    report.aggregate.f1_25 += r.metrics.f1_25;
    report.aggregate.f1_50 += r.metrics.f1_50;
    report.sequences.push_back(std::move(r));
  }
  if (!sequences.empty()) {
    const double n = static_cast<double>(sequences.size());
    report.aggregate.acc = 100.0 * static_cast<double>(correct) / static_cast<double>(frames);
    report.aggregate.edit /= n;
    report.aggregate.f1_10 /= n;
    report.aggregate.f1_25 /= n;
    report.aggregate.f1_50 /= n;
  }
  return report;
}

EvaluationReport evaluate(const Backbone& model, const std::vector<const SkeletonSequence*>& sequences,
                          const PostprocessOptions& options) {
  std::vector<std::vector<int>> predictions;
  for (const SkeletonSequence* seq : sequences) predictions.push_back(predict(model, *seq, options));
  return evaluate_predictions(predictions, sequences);
}

std::string metrics_csv_header() { return "dataset,split,run,acc,edit,f1_10,f1_25,f1_50"; }

std::string metrics_csv_row(const std::string& dataset, const std::string& split, const std::string& run,
                            const MetricReport& r) {
  return dataset + "," + split + "," + run + "," + fixed1(r.acc) + "," + fixed1(r.edit) + "," + fixed1(r.f1_10) + "," +
         fixed1(r.f1_25) + "," + fixed1(r.f1_50);
}

void write_evaluation_csv(const std::filesystem::path& path, const std::string& dataset, const std::string& split,
                          const std::string& run, const EvaluationReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << metrics_csv_header() << '\n' << metrics_csv_row(dataset, split, run, report.aggregate) << '\n';
  const auto per_sequence = path.parent_path() / (path.stem().string() + "_sequences.csv");
  std::ofstream seqs(per_sequence);
  if (!seqs) throw IoError("cannot write " + per_sequence.string());
  seqs << "id,frames,acc,edit,f1_10,f1_25,f1_50\n";
  for (const SequenceReport& s : report.sequences) {
    seqs << s.id << ',' << s.frames << ',' << fixed1(s.metrics.acc) << ',' << fixed1(s.metrics.edit) << ','
         << fixed1(s.metrics.f1_10) << ',' << fixed1(s.metrics.f1_25) << ',' << fixed1(s.metrics.f1_50) << '\n';
  }
}

void write_epoch_log(const std::filesystem::path& path, const std::vector<EpochLog>& log) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch,total,segmentation,boundary,contrastive,discrepancy,mean_adjacent_discrepancy,"
         "heldout_acc,heldout_edit,heldout_f1_10,heldout_f1_25,heldout_f1_50\n";
  char buf[512];
  for (const EpochLog& e : log) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", e.epoch, e.total, e.segmentation,
                  e.boundary, e.contrastive, e.discrepancy, e.mean_adjacent_discrepancy);
    out << buf;
    if (e.has_heldout) {
      std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f,%.4f,%.4f", e.heldout.acc, e.heldout.edit, e.heldout.f1_10,
                    e.heldout.f1_25, e.heldout.f1_50);
      out << buf << '\n';
    } else {
      out << ",,,,,\n";
    }
  }
}

}  // namespace scalpel
