#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "scalpel/tensor.hpp"

namespace testing_support {

std::vector<double> normal_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0);
scalpel::Tensor normal_tensor(std::mt19937_64& rng, scalpel::Shape shape, double scale = 1.0,
                              bool requires_grad = false);

/// Random frame labels with runs of random length over `classes` classes.
std::vector<int> random_labels(std::mt19937_64& rng, std::size_t length, int classes, std::size_t max_run);

}  // namespace testing_support
