#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalpel/backbone/model.hpp"
#include "scalpel/grad_check.hpp"

namespace scalpel {

/// Miniature configuration used by the gradient checks:
/// C=8, T=32, V=4, Q=3, L=2.
BackboneConfig miniature_config();

struct GradSuiteOptions {
  std::uint64_t seed = 11;
  /// Coordinates probed per tensor; 0 probes every coordinate.
  std::size_t max_coordinates = 0;
};

/// Modules: masf, aadl, facm, gs_tmse, boundary, contrastive, backbone, or all.
/// Throws ContractError for an unknown name.
std::vector<GradCheckReport> run_gradcheck_suite(const std::string& module, const GradSuiteOptions& options = {});

}  // namespace scalpel
