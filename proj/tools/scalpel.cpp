// Command line front end: gradient checks, the filter demo, data generation,
// training, evaluation, perturbation and standalone metrics.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>

#include "scalpel/errors.hpp"
#include "scalpel/harness/checkpoint.hpp"
#include "scalpel/harness/config.hpp"
#include "scalpel/harness/filter_demo.hpp"
#include "scalpel/harness/gradcheck_suite.hpp"
#include "scalpel/harness/perturb.hpp"
#include "scalpel/harness/sequence.hpp"
#include "scalpel/harness/synthetic.hpp"
#include "scalpel/harness/trainer.hpp"
#include "scalpel/metrics.hpp"

namespace fs = std::filesystem;
using namespace scalpel;

namespace {

int run_gradcheck(const std::string& module, double tolerance) {
  bool ok = true;
  for (const GradCheckReport& r : run_gradcheck_suite(module)) {
    const bool pass = r.passed(tolerance);
    ok = ok && pass;
    std::printf("%-12s max_rel_error=%.3e  %s\n", r.op_name.c_str(), r.max_rel_error, pass ? "PASS" : "FAIL");
  }
  return ok ? 0 : 1;
}

int run_filter_demo(const std::string& spec_path, const std::string& filter_path, const std::string& out,
                    const std::string& json_out, const AadlConfig& aadl) {
  const SyntheticSpec spec = synthetic_spec_from_json(read_json(spec_path));
  const FilterDescription filter =
      filter_path.empty() ? FilterDescription::identity() : FilterDescription::from_json(read_json(filter_path));
  const FilterDemoReport report = filter_demo(spec, filter, aadl);
  write_filter_demo(report, out, json_out);
  std::printf("aadl_before=%.6f aadl_after=%.6f reduction=%.1f%%\n", report.aadl_before, report.aadl_after,
              report.aadl_before > 0 ? 100.0 * (1.0 - report.aadl_after / report.aadl_before) : 0.0);
  return 0;
}

int run_gen(const std::string& spec_path, const std::string& out) {
  const nlohmann::json spec = read_json(spec_path);
  Dataset ds;
  if (is_dataset_spec(spec)) {
    ds = gen_dataset(dataset_spec_from_json(spec));
  } else {
    ds.sequences.push_back(gen_synthetic(synthetic_spec_from_json(spec)));
    int max_label = 0;
    for (int l : ds.sequences.front().labels) max_label = std::max(max_label, l);
    for (int c = 0; c <= max_label; ++c) ds.class_names.push_back("class_" + std::to_string(c));
  }
  save_dataset(ds, out);
  spdlog::info("wrote {} sequence(s) to {}", ds.sequences.size(), out);
  return 0;
}

int run_train(const std::string& config_path, const std::string& data, const std::string& out) {
  const ExperimentConfig config = load_config(config_path);
  const Dataset ds = load_dataset(data);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out + ": " + ec.message());
  TrainOptions options;
  options.dump_dir = out;
  const TrainResult result = train(config, ds, options);
  save_checkpoint(fs::path(out) / "model.ckpt", result.config, result.class_names, result.model.parameters());
  write_epoch_log(fs::path(out) / "epoch_log.csv", result.log);

  nlohmann::json split = {{"train", nlohmann::json::array()}, {"eval", nlohmann::json::array()}};
  for (std::size_t i : result.split.train) split["train"].push_back(ds.sequences[i].id);
  for (std::size_t i : result.split.eval) split["eval"].push_back(ds.sequences[i].id);
  std::ofstream(fs::path(out) / "split.json") << split.dump(2) << '\n';

  if (!result.split.eval.empty()) {
    std::vector<const SkeletonSequence*> heldout;
    for (std::size_t i : result.split.eval) heldout.push_back(&ds.sequences[i]);
    const EvaluationReport report = evaluate(result.model, heldout, result.config.postprocess);
    write_evaluation_csv(fs::path(out) / "heldout.csv", fs::path(data).filename().string(), "eval", "final", report);
    std::printf("%s\n%s\n", metrics_csv_header().c_str(),
                metrics_csv_row(fs::path(data).filename().string(), "eval", "final", report.aggregate).c_str());
  }
  return 0;
}

int run_eval(const std::string& checkpoint_path, const std::string& data, const std::string& out,
             const std::string& split_name, const std::string& run) {
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  const Backbone model = model_from_checkpoint(ck);
  const Dataset ds = load_dataset(data);
  std::vector<const SkeletonSequence*> chosen;
  if (split_name == "all") {
    for (const SkeletonSequence& s : ds.sequences) chosen.push_back(&s);
  } else {
    const DatasetSplit split = split_dataset(ds, ck.config.train_fraction, ck.config.seed);
    for (std::size_t i : split_name == "train" ? split.train : split.eval) chosen.push_back(&ds.sequences[i]);
  }
  const EvaluationReport report = evaluate(model, chosen, ck.config.postprocess);
  const std::string name = fs::path(data).filename().string();
  write_evaluation_csv(out, name, split_name, run, report);
  std::printf("%s\n%s\n", metrics_csv_header().c_str(), metrics_csv_row(name, split_name, run, report.aggregate).c_str());
  return 0;
}

int run_perturb(const std::string& kind, double magnitude, std::uint64_t seed, const std::string& in,
                const std::string& out) {
  const SkeletonSequence seq = load_sequence(in);
  const SkeletonSequence result = perturb(seq, parse_perturb_kind(kind), magnitude, seed);
  save_sequence(result, out);
  spdlog::info("{} x{} -> {} ({} frames)", kind, magnitude, out, result.frames());
  return 0;
}

std::vector<int> read_labels(const std::string& path) {
  if (fs::path(path).extension() == ".seq") return load_sequence(path).labels;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<int> labels;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      labels.push_back(std::stoi(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw FormatError(path + ": '" + token + "' is not an integer label");
    }
  }
  return labels;
}

int run_metrics(const std::string& pred_path, const std::string& gt_path) {
  const MetricReport r = segment_metrics(read_labels(pred_path), read_labels(gt_path));
  std::printf("acc,edit,f1_10,f1_25,f1_50\n%.1f,%.1f,%.1f,%.1f,%.1f\n", r.acc, r.edit, r.f1_10, r.f1_25, r.f1_50);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::cfg::load_env_levels();
  CLI::App app{"scalpel: spectral action segmentation toolkit"};
  app.require_subcommand(1);

  std::string module = "all";
  double tolerance = 1e-4;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks at miniature scale");
  gradcheck->add_option("--module", module, "all|masf|aadl|facm|gs_tmse|boundary|contrastive|backbone");
  gradcheck->add_option("--tolerance", tolerance, "maximum relative error");

  std::string spec, filter, demo_out = "filter_demo.csv", demo_json;
  AadlConfig aadl;
  auto* demo = app.add_subcommand("filter-demo", "filter a synthetic sequence and report spectra and AADL");
  demo->add_option("--spec", spec, "synthetic sequence spec (JSON)")->required();
  demo->add_option("--filter", filter, "filter description (JSON); identity when omitted");
  demo->add_option("--out", demo_out, "spectra CSV");
  demo->add_option("--json", demo_json, "optional plot-data JSON");
  demo->add_option("--spectral-length", aadl.spectral_length, "S_f");
  demo->add_option("--alpha", aadl.alpha, "AADL alpha");

  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate synthetic data");
  gen->add_option("--spec", spec, "sequence or dataset spec (JSON)")->required();
  gen->add_option("--out", gen_out, "output directory")->required();

  std::string config, data, train_out;
  auto* train_cmd = app.add_subcommand("train", "train on a dataset directory");
  train_cmd->add_option("--config", config, "experiment config (JSON)")->required();
  train_cmd->add_option("--data", data, "dataset directory")->required();
  train_cmd->add_option("--out", train_out, "output directory")->required();

  std::string checkpoint, eval_out, split = "eval", run = "run0";
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--data", data, "dataset directory")->required();
  eval_cmd->add_option("--out", eval_out, "metrics CSV")->required();
  eval_cmd->add_option("--split", split, "eval|train|all")->check(CLI::IsMember({"eval", "train", "all"}));
  eval_cmd->add_option("--run", run, "run name for the CSV row");

  std::string kind, in_path, out_path;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
  auto* perturb_cmd = app.add_subcommand("perturb", "apply a robustness perturbation to a sequence file");
  perturb_cmd->add_option("--kind", kind, "gaussian_noise|joint_occlusion|boundary_jitter|temporal_rescale")->required();
  perturb_cmd->add_option("--magnitude", magnitude, "perturbation magnitude")->required();
  perturb_cmd->add_option("--seed", seed, "random seed")->required();
  perturb_cmd->add_option("--in", in_path, "input .seq file")->required();
  perturb_cmd->add_option("--out", out_path, "output .seq file")->required();

  std::string pred, gt;
  auto* metrics_cmd = app.add_subcommand("metrics", "segmentation metrics between two label files");
  metrics_cmd->add_option("--pred", pred, "predicted labels (.seq or whitespace separated ints)")->required();
  metrics_cmd->add_option("--gt", gt, "ground-truth labels (.seq or whitespace separated ints)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gradcheck) return run_gradcheck(module, tolerance);
    if (*demo) return run_filter_demo(spec, filter, demo_out, demo_json, aadl);
    if (*gen) return run_gen(spec, gen_out);
    if (*train_cmd) return run_train(config, data, train_out);
    if (*eval_cmd) return run_eval(checkpoint, data, eval_out, split, run);
    if (*perturb_cmd) return run_perturb(kind, magnitude, seed, in_path, out_path);
    if (*metrics_cmd) return run_metrics(pred, gt);
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const FormatError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 1;
}
