#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalpel/harness/sequence.hpp"

namespace scalpel {

struct CosineComponent {
  double frequency = 0.0;  // Hz
  double amplitude = 1.0;
  double phase = 0.0;      // radians
};

struct SegmentSpec {
  int label = 0;
  std::size_t frames = 0;
  std::vector<CosineComponent> components;
};

/// One sequence built from cosines. Every cosine is evaluated on the global
/// time axis t / sample_rate, so shared components run continuously across
/// segment boundaries.
struct SyntheticSpec {
  std::string id = "synthetic";
  double sample_rate = 50.0;
  std::size_t channels = 1;
  std::size_t joints = 1;
  std::vector<CosineComponent> shared;
  std::vector<SegmentSpec> segments;
  double noise = 0.0;            // Gaussian standard deviation
  double joint_variation = 0.0;  // spread of per-(channel, joint) gain and phase
  bool velocity_channel = false; // append frame differences as extra channels
  std::uint64_t seed = 0;

  /// Throws ConfigError on a component at or above Nyquist or an empty segment.
  void validate() const;
};

SkeletonSequence gen_synthetic(const SyntheticSpec& spec);

/// Many sequences with alternating class segments.
struct ClassSpec {
  std::string name;
  std::vector<CosineComponent> components;
};

struct DatasetSpec {
  std::vector<ClassSpec> classes;
  std::vector<CosineComponent> shared;
  std::size_t sequences = 20;
  std::size_t frames = 256;
  std::size_t segments_per_sequence = 3;
  double duration_jitter = 0.25;  // fraction of the mean segment length
  double sample_rate = 50.0;
  std::size_t channels = 1;
  std::size_t joints = 4;
  double noise = 0.0;
  double joint_variation = 0.0;
  bool velocity_channel = false;
  std::uint64_t seed = 0;

  void validate() const;
};

Dataset gen_dataset(const DatasetSpec& spec);

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);
DatasetSpec dataset_spec_from_json(const nlohmann::json& j);
/// True when the JSON describes a dataset (has "classes") rather than one sequence.
bool is_dataset_spec(const nlohmann::json& j);

}  // namespace scalpel
