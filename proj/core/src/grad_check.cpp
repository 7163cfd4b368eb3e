#include "scalpel/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "scalpel/errors.hpp"

namespace scalpel {

namespace {

struct Probe {
  double value;
  std::uint64_t branches;
};

Probe evaluate(const std::function<Tensor()>& f, const std::string& op_name) {
  NoGradGuard guard;
  detail::BranchTrace trace;
  const double v = f().item();
  if (!std::isfinite(v)) throw NumericalError(op_name + ": non-finite function value during grad check");
  return {v, trace.hash()};
}

}  // namespace

GradCheckReport grad_check(const std::string& op_name, const std::function<Tensor()>& f,
                           std::vector<NamedTensor> params, const GradCheckOptions& options) {
  if (options.step <= 0) throw ContractError("grad_check step must be positive");
  for (auto& p : params) {
    if (!p.tensor.node() || !p.tensor.node()->is_leaf()) {
      throw ContractError("grad_check parameter '" + p.name + "' is not a leaf tensor");
    }
    p.tensor.set_requires_grad(true);
    p.tensor.zero_grad();
  }

  Tensor loss = f();
  if (!std::isfinite(loss.item())) throw NumericalError(op_name + ": non-finite loss");
  if (loss.requires_grad()) loss.backward();

  const std::uint64_t base_branches = evaluate(f, op_name).branches;
  GradCheckReport report;
  report.op_name = op_name;
  std::mt19937_64 rng(options.seed);
  for (auto& p : params) {
    const std::vector<double> analytic = p.tensor.grad();
    std::vector<std::size_t> coords(p.tensor.numel());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.max_coordinates != 0 && coords.size() > options.max_coordinates) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coordinates);
      std::sort(coords.begin(), coords.end());
    }
    ParameterError entry{p.name, 0.0, 0, 0};
    auto values = p.tensor.mutable_data();
    for (std::size_t c : coords) {
      if (!std::isfinite(analytic[c])) throw NumericalError(op_name + ": non-finite analytic gradient");
      const double saved = values[c];
      values[c] = saved + options.step;
      const Probe plus = evaluate(f, op_name);
      values[c] = saved - options.step;
      const Probe minus = evaluate(f, op_name);
      values[c] = saved;
      if (options.skip_kinks && (plus.branches != base_branches || minus.branches != base_branches)) {
        ++entry.coordinates_skipped;
        continue;
      }
      ++entry.coordinates_checked;
      const double numeric = (plus.value - minus.value) / (2.0 * options.step);
      const double denom = std::max({std::abs(analytic[c]), std::abs(numeric), options.floor});
      entry.max_rel_error = std::max(entry.max_rel_error, std::abs(analytic[c] - numeric) / denom);
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.coordinates_checked += entry.coordinates_checked;
    report.coordinates_skipped += entry.coordinates_skipped;
    report.per_parameter.push_back(std::move(entry));
  }
  return report;
}

}  // namespace scalpel
