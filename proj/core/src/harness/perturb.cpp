#include "scalpel/harness/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "scalpel/errors.hpp"
#include "scalpel/ops.hpp"
#include "scalpel/spectral_ops.hpp"

namespace scalpel {

PerturbKind parse_perturb_kind(const std::string& name) {
  if (name == "gaussian_noise") return PerturbKind::gaussian_noise;
  if (name == "joint_occlusion") return PerturbKind::joint_occlusion;
  if (name == "boundary_jitter") return PerturbKind::boundary_jitter;
  if (name == "temporal_rescale") return PerturbKind::temporal_rescale;
  throw ContractError("unknown perturbation '" + name + "'");
}

std::string to_string(PerturbKind kind) {
  switch (kind) {
    case PerturbKind::gaussian_noise: return "gaussian_noise";
    case PerturbKind::joint_occlusion: return "joint_occlusion";
    case PerturbKind::boundary_jitter: return "boundary_jitter";
    case PerturbKind::temporal_rescale: return "temporal_rescale";
  }
  return "unknown";
}

namespace {

SkeletonSequence add_noise(const SkeletonSequence& seq, double magnitude, std::uint64_t seed) {
  const auto& x = seq.data.values();
  const double n = static_cast<double>(x.size());
  const double mu = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double var = 0.0;
  for (double v : x) var += (v - mu) * (v - mu);
  const double sigma = magnitude * std::sqrt(var / n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out = x;
  for (double& v : out) v += sigma * normal(rng);
  SkeletonSequence r = seq;
  r.data = Tensor(seq.data.shape(), std::move(out));
  return r;
}

SkeletonSequence occlude(const SkeletonSequence& seq, double magnitude, std::uint64_t seed) {
  const std::size_t C = seq.channels(), T = seq.frames(), V = seq.joints();
  const auto count = std::min(V, static_cast<std::size_t>(std::floor(magnitude * static_cast<double>(V))));
  std::vector<std::size_t> joints(V);
  std::iota(joints.begin(), joints.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(joints.begin(), joints.end(), rng);
  std::vector<double> out = seq.data.values();
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t t = 0; t < T; ++t) out[(c * T + t) * V + joints[k]] = 0.0;
  }
  SkeletonSequence r = seq;
  r.data = Tensor(seq.data.shape(), std::move(out));
  return r;
}

SkeletonSequence jitter(const SkeletonSequence& seq, double magnitude, std::uint64_t seed) {
  const long m = std::lround(magnitude);
  const long T = static_cast<long>(seq.frames());
  const std::size_t n = seq.boundaries.size();
  std::vector<int> classes{seq.labels.front()};
  for (std::size_t b : seq.boundaries) classes.push_back(seq.labels[b]);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> shift(-m, m);
  std::vector<long> moved(n);
  for (std::size_t i = 0; i < n; ++i) moved[i] = static_cast<long>(seq.boundaries[i]) + shift(rng);
  // Re-clamp left to right: each boundary must leave room for the ones after it.
  long previous = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long highest = T - static_cast<long>(n - i);
    moved[i] = std::clamp(moved[i], previous + 1, highest);
    previous = moved[i];
  }

  SkeletonSequence r = seq;
  r.boundaries.assign(moved.begin(), moved.end());
  std::size_t segment = 0;
  for (long t = 0; t < T; ++t) {
    while (segment < n && t >= moved[segment]) ++segment;
    r.labels[static_cast<std::size_t>(t)] = classes[segment];
  }
  // Neighbouring segments of one class would leave a boundary with no label change.
  r.boundaries = boundaries_from_labels(r.labels);
  return r;
}

SkeletonSequence rescale(const SkeletonSequence& seq, double factor) {
  if (!(factor > 0)) throw ContractError("temporal_rescale needs a positive factor");
  const std::size_t T = seq.frames();
  const auto target = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(T) * factor)));
  SkeletonSequence r = seq;
  if (target == T) return r;
  {
    NoGradGuard guard;
    const Tensor resampled = linear_map(seq.data, 1, linear_resample_matrix(T, target), target, T);
    r.data = Tensor(resampled.shape(), resampled.values());
  }
  r.labels.resize(target);
  for (std::size_t t = 0; t < target; ++t) {
    const double pos = target > 1 ? static_cast<double>(t) * static_cast<double>(T - 1) / static_cast<double>(target - 1)
                                  : 0.0;
    r.labels[t] = seq.labels[static_cast<std::size_t>(std::lround(pos))];
  }
  r.boundaries = boundaries_from_labels(r.labels);
  return r;
}

}  // namespace

SkeletonSequence perturb(const SkeletonSequence& seq, PerturbKind kind, double magnitude, std::uint64_t seed) {
  seq.validate();
  if (!(magnitude >= 0) || !std::isfinite(magnitude)) throw ContractError("perturbation magnitude must be >= 0");
  if (magnitude == 0.0) return seq;
  switch (kind) {
    case PerturbKind::gaussian_noise: return add_noise(seq, magnitude, seed);
    case PerturbKind::joint_occlusion: return occlude(seq, magnitude, seed);
    case PerturbKind::boundary_jitter: return jitter(seq, magnitude, seed);
    case PerturbKind::temporal_rescale: return rescale(seq, magnitude);
  }
  return seq;
}

}  // namespace scalpel
