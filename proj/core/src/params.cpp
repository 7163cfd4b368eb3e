#include "scalpel/params.hpp"

#include <cmath>

#include "scalpel/errors.hpp"

namespace scalpel {

Tensor Initializer::fan_in_uniform(Shape shape, std::size_t fan_in) {
  if (fan_in == 0) throw ConfigError("fan_in must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> values(shape_numel(shape));
  for (double& v : values) v = dist(rng_);
  return Tensor(std::move(shape), std::move(values), true);
}

Tensor Initializer::zeros(Shape shape) { return Tensor::zeros(std::move(shape), true); }

Tensor Initializer::ones(Shape shape) { return Tensor::ones(std::move(shape), true); }

Tensor Initializer::identity(std::size_t n) {
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) values[i * n + i] = 1.0;
  return Tensor({n, n}, std::move(values), true);
}

}  // namespace scalpel
