#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scalpel/grad_check.hpp"
#include "scalpel/tensor.hpp"

namespace scalpel {

/// Flat, ordered view of trainable tensors keyed by dotted path.
using ParamList = std::vector<NamedTensor>;

/// Seeded source of initial parameter values. Draw order is part of the
/// determinism contract: modules always draw in declaration order.
class Initializer {
 public:
  explicit Initializer(std::uint64_t seed) : rng_(seed) {}

  /// U(-1 / sqrt(fan_in), 1 / sqrt(fan_in)), the usual point-wise conv default.
  Tensor fan_in_uniform(Shape shape, std::size_t fan_in);
  Tensor zeros(Shape shape);
  Tensor ones(Shape shape);
  Tensor identity(std::size_t n);

 private:
  std::mt19937_64 rng_;
};

}  // namespace scalpel
