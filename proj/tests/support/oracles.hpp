#pragma once

// Independent reference implementations used only by tests. None of these
// share code with the library routes they check.

#include <complex>
#include <cstddef>
#include <vector>

#include "scalpel/metrics.hpp"
#include "scalpel/tensor.hpp"

namespace oracle {

using Complex = std::complex<double>;

/// Direct O(T^2) DFT, X_k = sum_t x_t exp(-2 pi i k t / T).
std::vector<Complex> dft(const std::vector<double>& x);

/// Bins 0..T/2 of `dft`.
std::vector<Complex> half_dft(const std::vector<double>& x);

/// Floyd-Warshall over unit-weight bones; unreachable = SIZE_MAX.
std::vector<std::vector<std::size_t>> hop_distances(std::size_t joints,
                                                    const std::vector<std::pair<std::size_t, std::size_t>>& edges);

/// Plain recursive edit distance with a memo table.
std::size_t edit_distance(const std::vector<int>& a, const std::vector<int>& b);

/// Edit score computed straight from frame labels.
double edit_score(const std::vector<int>& pred, const std::vector<int>& gt);

/// MS-TCN style greedy F1 working on frame arrays: intersections and unions
/// are counted frame by frame instead of from interval arithmetic.
double greedy_f1(const std::vector<int>& pred, const std::vector<int>& gt, double threshold);

/// Maximum number of same-class (pred, gt) pairs with IoU >= threshold that
/// can be matched one-to-one, found by exhaustive augmenting paths.
std::size_t optimal_matches(const std::vector<int>& pred, const std::vector<int>& gt, double threshold);

/// F1 from a match count.
double f1_from_matches(std::size_t matches, std::size_t pred_segments, std::size_t gt_segments);

/// Run-length segments of a label sequence, written from scratch.
std::vector<scalpel::Segment> runs(const std::vector<int>& labels);

/// Silhouette, Calinski-Harabasz and Davies-Bouldin straight from their
/// textbook formulas (no degenerate-case handling; callers avoid them).
struct Clustering {
  double silhouette;
  double calinski_harabasz;
  double davies_bouldin;
};
Clustering clustering(const std::vector<std::vector<double>>& points, const std::vector<int>& labels);

/// Linear interpolation of a length-S_n vector onto `target` points with
/// both endpoints pinned.
std::vector<double> resample(const std::vector<double>& x, std::size_t target);

}  // namespace oracle
