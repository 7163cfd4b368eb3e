// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "scalpel/backbone/model.hpp"
#include "scalpel/facm.hpp"
#include "scalpel/fft.hpp"
#include "scalpel/harness/config.hpp"
#include "scalpel/harness/filter_demo.hpp"
#include "scalpel/harness/gradcheck_suite.hpp"
#include "scalpel/harness/perturb.hpp"
#include "scalpel/harness/synthetic.hpp"
#include "scalpel/harness/trainer.hpp"
#include "scalpel/masf.hpp"
#include "scalpel/metrics.hpp"
#include "scalpel/ops.hpp"
#include "scalpel/spectrum.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace scalpel;

namespace {

// Pinned tolerances and budgets.
constexpr double kFftTol = 1e-9;
constexpr double kFftSeconds = 5.0;
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 60.0;
constexpr double kFacmTol = 1e-10;
constexpr double kIdentityTol = 1e-9;
constexpr double kFig1MinReduction = 0.5;
constexpr double kFig1Seconds = 1.0;
constexpr double kToyMinAccuracy = 95.0;
constexpr double kToySeconds = 300.0;
constexpr double kClusterTol = 1e-9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome fft_correctness() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  double worst_dft = 0.0, worst_round = 0.0;
  for (std::size_t T : {7u, 32u, 100u, 256u}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = testing_support::normal_vector(rng, T);
      const ComplexSpectrum s = rfft(Tensor({T}, x), 0);
      const auto ref = oracle::half_dft(x);
      double scale = 1.0, err = 0.0;
      for (std::size_t k = 0; k < ref.size(); ++k) {
        scale = std::max(scale, std::abs(ref[k]));
        err = std::max(err, std::abs(ref[k] - oracle::Complex(s.packed.at({0, k}), s.packed.at({1, k}))));
      }
      worst_dft = std::max(worst_dft, err / scale);
      const Tensor back = irfft(s, T);
      double xmax = 1e-300, rerr = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        xmax = std::max(xmax, std::abs(x[t]));
        rerr = std::max(rerr, std::abs(back.values()[t] - x[t]));
      }
      worst_round = std::max(worst_round, rerr / xmax);
    }
  }
  const double elapsed = seconds_since(start);
  return {worst_dft <= kFftTol && worst_round <= kFftTol && elapsed < kFftSeconds,
          fmt("dft_rel=%.2e roundtrip_rel=%.2e tol=%.0e time=%.3fs", worst_dft, worst_round, kFftTol, elapsed)};
}

Outcome gradient_suite() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  double worst = 0.0;
  std::string names;
  for (const GradCheckReport& r : run_gradcheck_suite("all")) {
    ok = ok && r.passed(kGradTol);
    worst = std::max(worst, r.max_rel_error);
    names += (names.empty() ? "" : ",") + r.op_name + (r.passed(kGradTol) ? "" : "(FAIL)");
  }
  const double elapsed = seconds_since(start);
  return {ok && elapsed < kGradSeconds,
          fmt("max_rel=%.2e tol=%.0e time=%.1fs", worst, kGradTol, elapsed) + " modules=" + names};
}

Outcome facm_equivalence() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> channels(1, 12), length(2, 96);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t C = channels(rng), T = length(rng);
    const FacmParams p{testing_support::normal_tensor(rng, {C, C}), testing_support::normal_tensor(rng, {C, C})};
    worst = std::max(worst, complex_equivalence_check(p, testing_support::normal_tensor(rng, {C, T})));
  }
  return {worst <= kFacmTol, fmt("max_abs=%.2e tol=%.0e pairs=100", worst, kFacmTol)};
}

Outcome filter_length_table() {
  const auto lengths = filter_lengths(4, 64);
  const bool ok = lengths == std::vector<std::size_t>{40, 48, 56, 64};
  std::string got;
  for (std::size_t l : lengths) got += (got.empty() ? "" : ",") + std::to_string(l);
  return {ok, "filter_lengths(4,64)=[" + got + "]"};
}

Outcome identity_noop() {
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    BackboneConfig cfg = miniature_config();
    std::mt19937_64 rng(seed);
    const Tensor x = testing_support::normal_tensor(rng, {cfg.in_channels, 48, cfg.joints});
    const Backbone full(cfg, SkeletonGraph::chain(cfg.joints), seed);
    cfg.use_masf = false;
    cfg.use_facm = false;
    const Backbone bare(cfg, SkeletonGraph::chain(cfg.joints), seed);
    NoGradGuard guard;
    const ForwardResult a = full.forward(x), b = bare.forward(x);
    worst = std::max(worst, max_abs_diff(a.filtered, b.filtered));
    worst = std::max(worst, max_abs_diff(a.representation, b.representation));
    for (std::size_t s = 0; s < a.class_logits.size(); ++s)
      worst = std::max(worst, max_abs_diff(a.class_logits[s], b.class_logits[s]));
    for (std::size_t s = 0; s < a.boundary_logits.size(); ++s)
      worst = std::max(worst, max_abs_diff(a.boundary_logits[s], b.boundary_logits[s]));
  }
  return {worst <= kIdentityTol, fmt("max_abs=%.2e tol=%.0e", worst, kIdentityTol)};
}

Outcome fig1_reproduction() {
  const auto start = std::chrono::steady_clock::now();
  const SyntheticSpec spec = synthetic_spec_from_json(read_json(SCALPEL_CONFIG_DIR "/fig1_spec.json"));
  const FilterDescription filter = FilterDescription::from_json(read_json(SCALPEL_CONFIG_DIR "/fig1_filter.json"));
  const FilterDemoReport r = filter_demo(spec, filter, AadlConfig{});
  const double elapsed = seconds_since(start);
  const double reduction = 1.0 - r.aadl_after / r.aadl_before;
  return {reduction >= kFig1MinReduction && elapsed < kFig1Seconds,
          fmt("aadl %.4f -> %.4f reduction=%.1f%% time=%.3fs", r.aadl_before, r.aadl_after, 100.0 * reduction,
              elapsed)};
}

bool same_run(const TrainResult& a, const TrainResult& b) {
  if (a.log.size() != b.log.size()) return false;
  for (std::size_t e = 0; e < a.log.size(); ++e) {
    const EpochLog &x = a.log[e], &y = b.log[e];
    if (x.total != y.total || x.discrepancy != y.discrepancy || x.heldout.acc != y.heldout.acc) return false;
  }
  const ParamList pa = a.model.parameters(), pb = b.model.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i].name != pb[i].name || pa[i].tensor.values() != pb[i].tensor.values()) return false;
  }
  return true;
}

Outcome toy_training() {
  const Dataset data = gen_dataset(dataset_spec_from_json(read_json(SCALPEL_CONFIG_DIR "/toy_dataset.json")));
  const ExperimentConfig cfg = load_config(SCALPEL_CONFIG_DIR "/toy_train.json");
  auto start = std::chrono::steady_clock::now();
  const TrainResult first = train(cfg, data);
  const double first_time = seconds_since(start);
  start = std::chrono::steady_clock::now();
  const TrainResult second = train(cfg, data);
  const double second_time = seconds_since(start);

  std::vector<const SkeletonSequence*> heldout;
  for (std::size_t i : first.split.eval) heldout.push_back(&data.sequences[i]);
  const EvaluationReport eval = evaluate(first.model, heldout, first.config.postprocess);
  const double acc = eval.aggregate.acc;
  const double aadl_first = first.log.front().discrepancy;
  const double aadl_last = first.log.back().discrepancy;
  const bool reproducible = same_run(first, second);
  const bool ok = first.log.size() == 100 && acc >= kToyMinAccuracy && aadl_last < aadl_first && reproducible &&
                  std::max(first_time, second_time) < kToySeconds;
  return {ok, fmt("heldout_acc=%.1f (min %.0f) aadl epoch1=%.4f epoch100=%.4f", acc, kToyMinAccuracy, aadl_first,
                  aadl_last) +
                  " reproducible=" + (reproducible ? "yes" : "no") +
                  fmt(" time=%.0fs/%.0fs", first_time, second_time) +
                  " eval_sequences=" + std::to_string(heldout.size())};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> length(1, 80);
  std::uniform_int_distribution<int> classes(1, 5);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t T = length(rng);
    const int Q = classes(rng);
    const auto gt = testing_support::random_labels(rng, T, Q, 15);
    const auto pred = testing_support::random_labels(rng, T, Q, 15);
    const auto ps = frames_to_segments(pred), gs = frames_to_segments(gt);
    if (edit_score(ps, gs) != oracle::edit_score(pred, gt)) ++mismatches;
    for (double th : {0.1, 0.25, 0.5})
      if (f1_at_iou(ps, gs, th) != oracle::greedy_f1(pred, gt, th)) ++mismatches;
  }
  // Hand examples.
  bool hand = true;
  {
    const auto gt = frames_to_segments({0, 0, 0, 0, 1, 1, 1, 1, 1, 1});
    const auto pred = frames_to_segments({0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    hand = hand && f1_at_iou(pred, gt, 0.5) == 100.0 && f1_at_iou(pred, gt, 0.82) == 50.0;
    hand = hand && std::abs(edit_score(frames_to_segments({0, 0, 1, 1, 0}), frames_to_segments({0, 0, 0, 1, 1})) -
                            200.0 / 3.0) < 1e-12;
    hand = hand && frame_accuracy({0, 1, 1, 0}, {0, 1, 0, 0}) == 75.0;
    hand = hand && levenshtein({1, 2, 3}, {1, 3}) == 1;
  }
  return {mismatches == 0 && hand,
          "cases=1000 mismatches=" + std::to_string(mismatches) + " hand_examples=" + (hand ? "ok" : "bad")};
}

Outcome clustering_square() {
  const ClusteringIndices c = clustering_indices({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {0, 0, 1, 1});
  const double sc = 3.0 - 2.0 * std::sqrt(2.0);
  const double err =
      std::max({std::abs(c.silhouette - sc), std::abs(c.calinski_harabasz - 2.0), std::abs(c.davies_bouldin - 1.0)});
  return {err <= kClusterTol, fmt("SC=%.9f CH=%.9f DB=%.9f max_err=%.1e", c.silhouette, c.calinski_harabasz,
                                  c.davies_bouldin, err)};
}

Outcome robustness() {
  const SkeletonSequence seq = gen_dataset(dataset_spec_from_json(read_json(SCALPEL_CONFIG_DIR "/toy_dataset.json")))
                                   .sequences.front();
  bool identity = true;
  for (PerturbKind k : {PerturbKind::gaussian_noise, PerturbKind::joint_occlusion, PerturbKind::boundary_jitter,
                        PerturbKind::temporal_rescale}) {
    const SkeletonSequence p = perturb(seq, k, 0.0, 5);
    identity = identity && p.data.values() == seq.data.values() && p.labels == seq.labels &&
               p.boundaries == seq.boundaries;
  }
  const bool noise_repro = perturb(seq, PerturbKind::gaussian_noise, 0.2, 8).data.values() ==
                           perturb(seq, PerturbKind::gaussian_noise, 0.2, 8).data.values();
  bool edit_kept = true;
  for (double m : {0.5, 0.8, 1.5, 2.0}) {
    const SkeletonSequence r = perturb(seq, PerturbKind::temporal_rescale, m, 0);
    edit_kept = edit_kept && edit_score(frames_to_segments(r.labels), frames_to_segments(seq.labels)) == 100.0;
  }
  return {identity && noise_repro && edit_kept, std::string("zero_magnitude_identity=") + (identity ? "yes" : "no") +
                                                    " noise_reproducible=" + (noise_repro ? "yes" : "no") +
                                                    " rescale_edit_100=" + (edit_kept ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fft_correctness", fft_correctness},     {"gradient_suite", gradient_suite},
      {"facm_equivalence", facm_equivalence},   {"filter_length_table", filter_length_table},
      {"identity_noop", identity_noop},         {"fig1_reproduction", fig1_reproduction},
      {"toy_training", toy_training},           {"metric_oracles", metric_oracles},
      {"clustering_square", clustering_square}, {"robustness", robustness}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %-20s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
