#include "scalpel/backbone/graph.hpp"

#include <cmath>
#include <limits>
#include <queue>

#include "scalpel/errors.hpp"

namespace scalpel {

SkeletonGraph SkeletonGraph::chain(std::size_t joints) {
  SkeletonGraph g;
  g.joints = joints;
  for (std::size_t j = 1; j < joints; ++j) g.edges.emplace_back(j - 1, j);
  return g;
}

SkeletonGraph SkeletonGraph::kinect25() {
  SkeletonGraph g;
  g.joints = 25;
  const std::pair<int, int> bones[] = {{1, 2},   {2, 21},  {3, 21},  {4, 3},   {5, 21},  {6, 5},
                                       {7, 6},   {8, 7},   {9, 21},  {10, 9},  {11, 10}, {12, 11},
                                       {13, 1},  {14, 13}, {15, 14}, {16, 15}, {17, 1},  {18, 17},
                                       {19, 18}, {20, 19}, {22, 23}, {23, 8},  {24, 25}, {25, 12}};
  for (auto [a, b] : bones) g.edges.emplace_back(a - 1, b - 1);
  return g;
}

void SkeletonGraph::validate() const {
  if (joints == 0) throw ConfigError("skeleton graph needs at least one joint");
  for (auto [a, b] : edges) {
    if (a >= joints || b >= joints) throw ConfigError("bone references a joint outside the graph");
  }
  if (text_graph.defined() && text_graph.shape() != Shape{joints, joints}) {
    throw ShapeError("text graph must be V x V");
  }
}

std::vector<std::vector<std::size_t>> SkeletonGraph::hop_distances() const {
  validate();
  constexpr std::size_t unreachable = std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<std::size_t>> neighbours(joints);
  for (auto [a, b] : edges) {
    neighbours[a].push_back(b);
    neighbours[b].push_back(a);
  }
  std::vector<std::vector<std::size_t>> dist(joints, std::vector<std::size_t>(joints, unreachable));
  for (std::size_t src = 0; src < joints; ++src) {
    std::queue<std::size_t> frontier;
    dist[src][src] = 0;
    frontier.push(src);
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (std::size_t v : neighbours[u]) {
        if (dist[src][v] == unreachable) {
          dist[src][v] = dist[src][u] + 1;
          frontier.push(v);
        }
      }
    }
  }
  return dist;
}

std::vector<std::vector<double>> k_adjacency(const SkeletonGraph& graph, std::size_t scales) {
  if (scales == 0) throw ConfigError("multi-scale GCN needs K >= 1");
  const auto dist = graph.hop_distances();
  const std::size_t V = graph.joints;
  std::vector<std::vector<double>> out(scales, std::vector<double>(V * V, 0.0));
  for (std::size_t k = 1; k <= scales; ++k) {
    auto& a = out[k - 1];
    for (std::size_t i = 0; i < V; ++i) {
      for (std::size_t j = 0; j < V; ++j) {
        if (i == j || dist[i][j] == k) a[i * V + j] = 1.0;
      }
    }
  }
  return out;
}

std::vector<double> normalize_adjacency(const std::vector<double>& adjacency, std::size_t joints, double eps) {
  std::vector<double> inv_sqrt(joints);
  for (std::size_t i = 0; i < joints; ++i) {
    double degree = eps;
    for (std::size_t j = 0; j < joints; ++j) degree += adjacency[i * joints + j];
    inv_sqrt[i] = 1.0 / std::sqrt(degree);
  }
  std::vector<double> out(joints * joints);
  for (std::size_t i = 0; i < joints; ++i) {
    for (std::size_t j = 0; j < joints; ++j) out[i * joints + j] = inv_sqrt[i] * adjacency[i * joints + j] * inv_sqrt[j];
  }
  return out;
}

Tensor multiscale_adjacency(const SkeletonGraph& graph, std::size_t scales, double eps) {
  const std::size_t V = graph.joints;
  const auto powers = k_adjacency(graph, scales);
  std::vector<double> out(V * scales * V);
  for (std::size_t k = 0; k < scales; ++k) {
    const auto norm = normalize_adjacency(powers[k], V, eps);
    for (std::size_t i = 0; i < V; ++i) {
      for (std::size_t j = 0; j < V; ++j) out[i * scales * V + k * V + j] = norm[i * V + j];
    }
  }
  return Tensor({V, scales * V}, std::move(out));
}

}  // namespace scalpel
