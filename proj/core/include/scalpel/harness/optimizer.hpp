#pragma once

#include <cstddef>
#include <vector>

#include "scalpel/params.hpp"

namespace scalpel {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction, updating the parameter tensors in place.
class Adam {
 public:
  Adam(ParamList params, AdamConfig config);

  void zero_grad();
  /// Applies one update from the accumulated gradients.
  void step();
  std::size_t steps() const { return steps_; }

 private:
  ParamList params_;
  AdamConfig config_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t steps_ = 0;
};

}  // namespace scalpel
