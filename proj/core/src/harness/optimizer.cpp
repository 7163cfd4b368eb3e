#include "scalpel/harness/optimizer.hpp"

#include <cmath>

namespace scalpel {

Adam::Adam(ParamList params, AdamConfig config) : params_(std::move(params)), config_(config) {
  for (const NamedTensor& p : params_) {
    m_.emplace_back(p.tensor.numel(), 0.0);
    v_.emplace_back(p.tensor.numel(), 0.0);
  }
}

void Adam::zero_grad() {
  for (NamedTensor& p : params_) p.tensor.zero_grad();
}

void Adam::step() {
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& w = params_[i].tensor;
    if (!w.has_grad()) continue;
    const std::vector<double> g = w.grad();
    auto data = w.mutable_data();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t k = 0; k < g.size(); ++k) {
      m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g[k];
      v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g[k] * g[k];
      data[k] -= config_.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.eps);
    }
  }
}

}  // namespace scalpel
