#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scalpel/backbone/model.hpp"
#include "scalpel/harness/config.hpp"

namespace scalpel {

/// Parameters plus everything needed to rebuild the model. The header JSON
/// holds the experiment config, class names and a table of
/// {name, shape, offset}; values follow as one little-endian f64 block.
struct Checkpoint {
  ExperimentConfig config;
  std::vector<std::string> class_names;
  ParamList tensors;  // detached copies
};

void save_checkpoint(const std::filesystem::path& path, const ExperimentConfig& config,
                     const std::vector<std::string>& class_names, const ParamList& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint values into the model's parameters by name. Throws
/// ShapeError on a missing name or a shape mismatch.
void bind_parameters(Backbone& model, const Checkpoint& checkpoint);

Backbone model_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace scalpel
