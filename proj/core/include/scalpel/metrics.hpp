#pragma once

#include <cstddef>
#include <vector>

#include "scalpel/tensor.hpp"

namespace scalpel {

struct Segment {
  int label = 0;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  bool operator==(const Segment&) const = default;
};

using SegmentList = std::vector<Segment>;

/// Percentages in [0, 100].
struct MetricReport {
  double acc = 0.0;
  double edit = 0.0;
  double f1_10 = 0.0;
  double f1_25 = 0.0;
  double f1_50 = 0.0;
};

/// Maximal runs of equal labels.
SegmentList frames_to_segments(const std::vector<int>& labels);

/// Throws ShapeError on a length mismatch.
double frame_accuracy(const std::vector<int>& pred, const std::vector<int>& gt);

std::size_t levenshtein(const std::vector<int>& a, const std::vector<int>& b);

/// 100 (1 - lev / max(|pred|, |gt|)), floored at 0; 100 when both are empty.
double edit_score(const SegmentList& pred, const SegmentList& gt);

double segment_iou(const Segment& a, const Segment& b);

/// Greedy matching in prediction order: each prediction takes the unmatched
/// same-class ground-truth segment with the highest IoU and is a true
/// positive when that IoU reaches `threshold`.
double f1_at_iou(const SegmentList& pred, const SegmentList& gt, double threshold);

MetricReport segment_metrics(const std::vector<int>& pred, const std::vector<int>& gt);

struct PostprocessOptions {
  double boundary_threshold = 0.5;
  std::size_t min_gap = 1;  // minimum distance between two accepted boundaries
};

/// Strict local maxima above the threshold in frames 1..T-1. When two peaks
/// are closer than `min_gap` the higher one wins.
std::vector<std::size_t> detect_boundaries(const std::vector<double>& probs, const PostprocessOptions& options);

/// Splits at detected boundaries and gives each interval the class with the
/// largest summed probability. `class_probs` is Q x T, `boundary_probs` 1 x T.
std::vector<int> asrf_postprocess(const Tensor& class_probs, const Tensor& boundary_probs,
                                  const PostprocessOptions& options = {});

struct ClusteringIndices {
  double silhouette = 0.0;
  double calinski_harabasz = 0.0;
  double davies_bouldin = 0.0;
};

/// Euclidean Silhouette mean, Calinski-Harabasz ratio and Davies-Bouldin
/// index. Degenerate conventions: a singleton cluster contributes silhouette
/// 0; zero within-cluster dispersion gives CH = 1; coincident centroids are
/// skipped in the Davies-Bouldin maximum. Throws IndexError with fewer than
/// two distinct labels.
ClusteringIndices clustering_indices(const std::vector<std::vector<double>>& points, const std::vector<int>& labels);

}  // namespace scalpel
