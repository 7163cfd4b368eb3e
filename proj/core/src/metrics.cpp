#include "scalpel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "scalpel/errors.hpp"

namespace scalpel {

SegmentList frames_to_segments(const std::vector<int>& labels) {
  SegmentList out;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (out.empty() || out.back().label != labels[t]) {
      out.push_back({labels[t], t, t + 1});
    } else {
      out.back().end = t + 1;
    }
  }
  return out;
}

double frame_accuracy(const std::vector<int>& pred, const std::vector<int>& gt) {
  if (pred.size() != gt.size()) {
    throw ShapeError("prediction has " + std::to_string(pred.size()) + " frames, ground truth " +
                     std::to_string(gt.size()));
  }
  if (gt.empty()) return 100.0;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < gt.size(); ++t) hits += pred[t] == gt[t];
  return 100.0 * static_cast<double>(hits) / static_cast<double>(gt.size());
}

std::size_t levenshtein(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

double edit_score(const SegmentList& pred, const SegmentList& gt) {
  const std::size_t longest = std::max(pred.size(), gt.size());
  if (longest == 0) return 100.0;
  std::vector<int> p, g;
  for (const Segment& s : pred) p.push_back(s.label);
  for (const Segment& s : gt) g.push_back(s.label);
  const double score = 100.0 * (1.0 - static_cast<double>(levenshtein(p, g)) / static_cast<double>(longest));
  return std::max(0.0, score);
}

double segment_iou(const Segment& a, const Segment& b) {
  const std::size_t lo = std::max(a.start, b.start), hi = std::min(a.end, b.end);
  const double inter = hi > lo ? static_cast<double>(hi - lo) : 0.0;
  const double uni = static_cast<double>(std::max(a.end, b.end) - std::min(a.start, b.start));
  return uni > 0 ? inter / uni : 0.0;
}

double f1_at_iou(const SegmentList& pred, const SegmentList& gt, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ContractError("IoU threshold must lie in (0, 1]");
  std::vector<bool> matched(gt.size(), false);
  std::size_t tp = 0, fp = 0;
  for (const Segment& p : pred) {
    double best = -1.0;
    std::size_t best_index = gt.size();
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (matched[j] || gt[j].label != p.label) continue;
      const double iou = segment_iou(p, gt[j]);
      if (iou > best) {
        best = iou;
        best_index = j;
      }
    }
    if (best_index < gt.size() && best >= threshold) {
      matched[best_index] = true;
      ++tp;
    } else {
      ++fp;
    }
  }
  const std::size_t fn = gt.size() - tp;
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 100.0 * 2.0 * precision * recall / (precision + recall);
}

MetricReport segment_metrics(const std::vector<int>& pred, const std::vector<int>& gt) {
  const SegmentList ps = frames_to_segments(pred), gs = frames_to_segments(gt);
  return MetricReport{frame_accuracy(pred, gt), edit_score(ps, gs), f1_at_iou(ps, gs, 0.10),
                      f1_at_iou(ps, gs, 0.25), f1_at_iou(ps, gs, 0.50)};
}

std::vector<std::size_t> detect_boundaries(const std::vector<double>& probs, const PostprocessOptions& options) {
  const std::size_t T = probs.size();
  std::vector<std::size_t> peaks;
  for (std::size_t t = 1; t < T; ++t) {
    const bool left = probs[t] > probs[t - 1];
    const bool right = t + 1 == T || probs[t] > probs[t + 1];
    if (left && right && probs[t] > options.boundary_threshold) peaks.push_back(t);
  }
  if (options.min_gap <= 1) return peaks;
  std::vector<std::size_t> order = peaks;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t t : order) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return (t > k ? t - k : k - t) >= options.min_gap;
    });
    if (clear) kept.push_back(t);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<int> asrf_postprocess(const Tensor& class_probs, const Tensor& boundary_probs,
                                  const PostprocessOptions& options) {
  if (class_probs.rank() != 2) throw ShapeError("class probabilities must be Q x T");
  const std::size_t Q = class_probs.dim(0), T = class_probs.dim(1);
  if (boundary_probs.numel() != T) throw ShapeError("boundary probabilities must have T entries");
  const auto& p = class_probs.values();
  std::vector<std::size_t> cuts = detect_boundaries(boundary_probs.values(), options);
  cuts.push_back(T);
  std::vector<int> labels(T);
  std::size_t start = 0;
  for (std::size_t end : cuts) {
    std::size_t best = 0;
    double best_mass = -1.0;
    for (std::size_t c = 0; c < Q; ++c) {
      double mass = 0.0;
      for (std::size_t t = start; t < end; ++t) mass += p[c * T + t];
      if (mass > best_mass) {
        best_mass = mass;
        best = c;
      }
    }
    std::fill(labels.begin() + static_cast<long>(start), labels.begin() + static_cast<long>(end),
              static_cast<int>(best));
    start = end;
  }
  return labels;
}

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

ClusteringIndices clustering_indices(const std::vector<std::vector<double>>& points, const std::vector<int>& labels) {
  const std::size_t n = points.size();
  if (labels.size() != n) throw ShapeError("need one label per point");
  if (n == 0) throw IndexError("clustering indices need points");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw ShapeError("points must share a dimension");
  }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) members[labels[i]].push_back(i);
  const std::size_t k = members.size();
  if (k < 2) throw IndexError("clustering indices need at least two clusters");

  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> cluster_of(n);
  for (auto& [label, idx] : members) {
    for (std::size_t i : idx) cluster_of[i] = clusters.size();
    clusters.push_back(idx);
  }

  ClusteringIndices out;

  // Silhouette.
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> mean_to(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) mean_to[cluster_of[j]] += distance(points[i], points[j]);
    }
    const std::size_t own = cluster_of[i];
    if (clusters[own].size() == 1) continue;
    const double a = mean_to[own] / static_cast<double>(clusters[own].size() - 1);
    double b = INFINITY;
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own) b = std::min(b, mean_to[c] / static_cast<double>(clusters[c].size()));
    }
    const double denom = std::max(a, b);
    total += denom > 0 ? (b - a) / denom : 0.0;
  }
  out.silhouette = total / static_cast<double>(n);

  // Centroids and dispersions.
  std::vector<double> overall(dim, 0.0);
  for (const auto& p : points)
    for (std::size_t d = 0; d < dim; ++d) overall[d] += p[d] / static_cast<double>(n);
  std::vector<std::vector<double>> centroid(k, std::vector<double>(dim, 0.0));
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i : clusters[c])
      for (std::size_t d = 0; d < dim; ++d) centroid[c][d] += points[i][d] / static_cast<double>(clusters[c].size());
  }
  double between = 0.0, within = 0.0;
  std::vector<double> scatter(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const double dc = distance(centroid[c], overall);
    between += static_cast<double>(clusters[c].size()) * dc * dc;
    for (std::size_t i : clusters[c]) {
      const double di = distance(points[i], centroid[c]);
      within += di * di;
      scatter[c] += di / static_cast<double>(clusters[c].size());
    }
  }
  out.calinski_harabasz = within == 0.0 ? 1.0
                                        : between * static_cast<double>(n - k) /
                                              (within * static_cast<double>(k - 1));

  double db = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double separation = distance(centroid[i], centroid[j]);
      if (separation > 0) worst = std::max(worst, (scatter[i] + scatter[j]) / separation);
    }
    db += worst;
  }
  out.davies_bouldin = db / static_cast<double>(k);
  return out;
}

}  // namespace scalpel
