#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "scalpel/tensor.hpp"

namespace scalpel {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct ParameterError {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::size_t coordinates_skipped = 0;
};

struct GradCheckReport {
  std::string op_name;
  double max_rel_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::size_t coordinates_skipped = 0;
  std::vector<ParameterError> per_parameter;

  /// Also fails when more than 5% of the probed coordinates had to be skipped.
  bool passed(double tol) const {
    return max_rel_error <= tol && 20 * coordinates_skipped <= coordinates_checked + coordinates_skipped;
  }
};

struct GradCheckOptions {
  double step = 1e-5;
  /// Differences below this magnitude are compared absolutely rather than
  /// relatively (denominator max(|analytic|, |numeric|, floor)).
  double floor = 1e-4;
  /// 0 checks every coordinate; otherwise at most this many per tensor, chosen
  /// deterministically from `seed`.
  std::size_t max_coordinates = 0;
  unsigned long long seed = 0;
  /// Skip coordinates whose +-step probes land on a different smooth piece of
  /// a piecewise op (see detail::BranchTrace); there the central difference
  /// straddles a kink and says nothing about the analytic gradient.
  bool skip_kinks = true;
};

/// Compares the analytic gradient of the scalar `f` against central differences
/// (f(p+h) - f(p-h)) / 2h for every listed leaf. Throws NumericalError on a
/// non-finite value. `f` must rebuild its graph on each call. Skipped
/// coordinates are counted, not compared.
GradCheckReport grad_check(const std::string& op_name, const std::function<Tensor()>& f,
                           std::vector<NamedTensor> params, const GradCheckOptions& options = {});

}  // namespace scalpel
