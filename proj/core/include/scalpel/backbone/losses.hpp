#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "scalpel/tensor.hpp"

namespace scalpel {

struct LossWeights {
  double lambda1 = 1.0;  // boundary regression
  double lambda2 = 0.8;  // action-text contrastive
  double lambda3 = 1.0;  // adjacent action discrepancy
  double sigma = 1.0;    // Gaussian similarity width
  double tau = 4.0;      // truncation of the squared log-ratio

  void validate() const;
};

/// exp(-||x_t - x_{t-1}||^2 / 2 sigma^2) for t = 1..T-1, where x_t is the
/// frame slice of `input` along axis 1 (any C x T x ... layout).
std::vector<double> gaussian_similarity(const Tensor& input, double sigma);

/// Frame-wise cross-entropy plus the similarity-weighted, tau^2-truncated
/// squared log-ratio of consecutive frame probabilities. `logits` is Q x T;
/// log-probabilities come from log_softmax, never log(softmax).
Tensor segmentation_loss(const Tensor& logits, const std::vector<int>& labels,
                         const std::vector<double>& similarity, double tau);

/// 1 at every frame that starts a new segment, 0 elsewhere.
std::vector<double> boundary_targets(std::size_t frames, const std::vector<std::size_t>& boundaries);

/// Mean binary cross-entropy over frames, taken on 1 x T logits so that
/// saturated probabilities keep exact gradients.
Tensor boundary_loss(const Tensor& logits, const std::vector<double>& targets);

/// Class-id keyed text embeddings of equal length.
struct TextEmbeddings {
  std::size_t dim = 0;
  std::map<int, std::vector<double>> vectors;

  /// Throws ConfigError when the class has no embedding.
  const std::vector<double>& at(int class_id) const;
};

/// Projects F_R (C x T) with `projection` (C_t x C), averages it inside every
/// ground-truth segment, and compares the segment vectors with the class text
/// embeddings through a cosine matrix softmaxed along rows and along columns.
/// Loss = 1/2 [KL(S_gt || S_row) + KL(S_gt || S_col)] with the 1/N^2 scaling.
Tensor action_text_contrastive(const Tensor& representation, const Tensor& projection,
                               const std::vector<std::size_t>& boundaries, const std::vector<int>& segment_classes,
                               const TextEmbeddings& embeddings);

/// sum(segmentation) + lambda1 sum(boundary) + lambda2 contrastive + lambda3 discrepancy.
Tensor total_loss(const std::vector<Tensor>& segmentation, const std::vector<Tensor>& boundary,
                  const Tensor& contrastive, const Tensor& discrepancy, const LossWeights& weights);

}  // namespace scalpel
