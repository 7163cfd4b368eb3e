#include "scalpel/backbone/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scalpel/errors.hpp"
#include "scalpel/ops.hpp"

namespace scalpel {

namespace {
// Log-probabilities never fall below log(kLogFloor), about -27.6.
const double kLogFloorValue = std::log(kLogFloor);
}  // namespace

void LossWeights::validate() const {
  if (lambda1 < 0 || lambda2 < 0 || lambda3 < 0) throw ConfigError("loss weights must be non-negative");
  if (!(sigma > 0) || !(tau > 0)) throw ConfigError("sigma and tau must be positive");
}

std::vector<double> gaussian_similarity(const Tensor& input, double sigma) {
  if (input.rank() < 2) throw ShapeError("similarity input needs a time axis at position 1");
  const std::size_t C = input.dim(0), T = input.dim(1);
  const std::size_t inner = input.numel() / (C * T);
  const auto& x = input.values();
  std::vector<double> out;
  out.reserve(T > 0 ? T - 1 : 0);
  for (std::size_t t = 1; t < T; ++t) {
    double dist2 = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      const double* now = x.data() + (c * T + t) * inner;
      const double* before = now - inner;
      for (std::size_t i = 0; i < inner; ++i) dist2 += (now[i] - before[i]) * (now[i] - before[i]);
    }
    out.push_back(std::exp(-dist2 / (2.0 * sigma * sigma)));
  }
  return out;
}

Tensor segmentation_loss(const Tensor& logits, const std::vector<int>& labels,
                         const std::vector<double>& similarity, double tau) {
  if (logits.rank() != 2) throw ShapeError("class logits must be Q x T");
  const std::size_t Q = logits.dim(0), T = logits.dim(1);
  if (labels.size() != T) throw ShapeError("label count does not match T");
  std::vector<double> onehot(Q * T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    if (labels[t] < 0 || static_cast<std::size_t>(labels[t]) >= Q) {
      throw ContractError("label " + std::to_string(labels[t]) + " outside [0, " + std::to_string(Q) + ")");
    }
    onehot[static_cast<std::size_t>(labels[t]) * T + t] = 1.0;
  }
  const Tensor log_probs = clamp_min(log_softmax(logits, 0), kLogFloorValue);
  Tensor loss = -sum(log_probs * Tensor({Q, T}, std::move(onehot))) * (1.0 / static_cast<double>(T));
  if (T < 2) return loss;
  if (similarity.size() != T - 1) throw ShapeError("similarity must have T - 1 entries");
  const Tensor ratio = slice(log_probs, 1, 1, T - 1) - slice(log_probs, 1, 0, T - 1);
  const Tensor truncated = clamp_max(square(ratio), tau * tau);
  const Tensor weight({1, T - 1}, similarity);
  return loss + sum(truncated * weight) * (1.0 / static_cast<double>(T * Q));
}

std::vector<double> boundary_targets(std::size_t frames, const std::vector<std::size_t>& boundaries) {
  std::vector<double> out(frames, 0.0);
  for (std::size_t b : boundaries) {
    if (b == 0 || b >= frames) throw BoundaryError("boundary " + std::to_string(b) + " outside (0, T)");
    out[b] = 1.0;
  }
  return out;
}

Tensor boundary_loss(const Tensor& logits, const std::vector<double>& targets) {
  if (logits.rank() != 2 || logits.dim(0) != 1) throw ShapeError("boundary logits must be 1 x T");
  const std::size_t T = logits.dim(1);
  if (targets.size() != T) throw ShapeError("boundary target count does not match T");
  std::vector<double> negatives(T);
  for (std::size_t t = 0; t < T; ++t) negatives[t] = 1.0 - targets[t];
  const Tensor b({1, T}, targets);
  const Tensor nb({1, T}, std::move(negatives));
  const Tensor log_p = clamp_min(log_sigmoid(logits), kLogFloorValue);
  const Tensor log_q = clamp_min(log_sigmoid(-logits), kLogFloorValue);
  return -sum(b * log_p + nb * log_q) * (1.0 / static_cast<double>(T));
}

const std::vector<double>& TextEmbeddings::at(int class_id) const {
  auto it = vectors.find(class_id);
  if (it == vectors.end()) throw ConfigError("no text embedding for class " + std::to_string(class_id));
  return it->second;
}

Tensor action_text_contrastive(const Tensor& representation, const Tensor& projection,
                               const std::vector<std::size_t>& boundaries, const std::vector<int>& segment_classes,
                               const TextEmbeddings& embeddings) {
  if (representation.rank() != 2) throw ShapeError("F_R must be C x T");
  const std::size_t T = representation.dim(1);
  const std::size_t N = boundaries.size() + 1;
  if (segment_classes.size() != N) throw ShapeError("need one class id per segment");
  const std::size_t Ct = projection.dim(0);
  if (embeddings.dim != Ct) throw ShapeError("embedding dimension does not match the projection");

  const Tensor projected = pointwise(projection, representation);  // C_t x T
  std::vector<Tensor> rows;
  std::vector<double> text(N * Ct);
  std::size_t start = 0;
  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t end = n + 1 < N ? boundaries[n] : T;
    if (end <= start || end > T) throw BoundaryError("segment boundaries must be strictly increasing inside (0, T)");
    rows.push_back(reshape(mean(slice(projected, 1, start, end - start), 1), {1, Ct}));
    const auto& e = embeddings.at(segment_classes[n]);
    if (e.size() != Ct) throw ShapeError("embedding length mismatch");
    std::copy(e.begin(), e.end(), text.begin() + static_cast<long>(n * Ct));
    start = end;
  }

  const Tensor visual = concat(rows, 0);  // N x C_t
  const Tensor visual_unit = visual / sqrt(sum(square(visual), 1, true) + 1e-24);
  // Unit-normalized text embeddings laid out column-wise (C_t x N).
  std::vector<double> text_columns(Ct * N);
  for (std::size_t n = 0; n < N; ++n) {
    double norm = 0.0;
    for (std::size_t i = 0; i < Ct; ++i) norm += text[n * Ct + i] * text[n * Ct + i];
    norm = std::sqrt(norm + 1e-24);
    for (std::size_t i = 0; i < Ct; ++i) text_columns[i * N + n] = text[n * Ct + i] / norm;
  }
  const Tensor cosine = matmul(visual_unit, Tensor({Ct, N}, std::move(text_columns)));

  std::vector<double> target(N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) target[i * N + j] = segment_classes[i] == segment_classes[j] ? 1.0 : 0.0;
  const Tensor gt({N, N}, std::move(target));
  // U log(U / W) with U in {0, 1} reduces to -U log W.
  const Tensor kl_rows = -sum(gt * log_softmax(cosine, 1));
  const Tensor kl_cols = -sum(gt * log_softmax(cosine, 0));
  return (kl_rows + kl_cols) * (0.5 / static_cast<double>(N * N));
}

Tensor total_loss(const std::vector<Tensor>& segmentation, const std::vector<Tensor>& boundary,
                  const Tensor& contrastive, const Tensor& discrepancy, const LossWeights& weights) {
  if (segmentation.empty()) throw ContractError("total loss needs at least one segmentation term");
  Tensor total = segmentation.front();
  for (std::size_t i = 1; i < segmentation.size(); ++i) total = total + segmentation[i];
  for (const Tensor& b : boundary) total = total + b * weights.lambda1;
  if (contrastive.defined()) total = total + contrastive * weights.lambda2;
  if (discrepancy.defined()) total = total + discrepancy * weights.lambda3;
  return total;
}

}  // namespace scalpel
