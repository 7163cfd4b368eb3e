#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "scalpel/tensor.hpp"

namespace scalpel {

/// One labelled skeleton clip. `data` is C0 x T x V.
struct SkeletonSequence {
  std::string id;
  Tensor data;
  std::vector<int> labels;
  std::vector<std::size_t> boundaries;  // frames where a new segment starts
  double sample_rate = 30.0;

  std::size_t channels() const { return data.dim(0); }
  std::size_t frames() const { return data.dim(1); }
  std::size_t joints() const { return data.dim(2); }

  /// Throws BoundaryError when boundaries and label changes disagree.
  void validate() const;
};

/// Frames where the label differs from the previous frame.
std::vector<std::size_t> boundaries_from_labels(const std::vector<int>& labels);

/// Binary `.seq` file; see container.hpp for the byte layout.
void save_sequence(const SkeletonSequence& seq, const std::filesystem::path& path);
SkeletonSequence load_sequence(const std::filesystem::path& path);

/// Class names and sequence files of a dataset directory. `dataset.json`
/// supplies the class names when present; every `*.seq` file is a member.
struct Dataset {
  std::vector<std::string> class_names;
  std::vector<SkeletonSequence> sequences;  // sorted by id
};

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace scalpel
