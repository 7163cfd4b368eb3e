#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "scalpel/tensor.hpp"

namespace scalpel {

/// Joint topology of a skeleton.
struct SkeletonGraph {
  std::size_t joints = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // undirected bones
  /// Optional V x V text-derived prior; undefined means "all zeros".
  Tensor text_graph;

  /// 0 - 1 - 2 - ... - (V-1).
  static SkeletonGraph chain(std::size_t joints);
  /// 25-joint Kinect v2 layout (PKU-MMD / NTU ordering, 0-based).
  static SkeletonGraph kinect25();

  /// All-pairs shortest path in bones; unreachable pairs hold SIZE_MAX.
  std::vector<std::vector<std::size_t>> hop_distances() const;
  void validate() const;
};

/// Binary V x V matrices A^k (k = 1..K): 1 iff hop distance is exactly k or i == j.
std::vector<std::vector<double>> k_adjacency(const SkeletonGraph& graph, std::size_t scales);

/// D^-1/2 A D^-1/2 with D_ii = sum_j A_ij + eps, row-major V x V.
std::vector<double> normalize_adjacency(const std::vector<double>& adjacency, std::size_t joints, double eps);

/// Normalized A^1 .. A^K concatenated along columns: V x (K V).
Tensor multiscale_adjacency(const SkeletonGraph& graph, std::size_t scales, double eps);

}  // namespace scalpel
