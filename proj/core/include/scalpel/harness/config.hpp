#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalpel/aadl.hpp"
#include "scalpel/backbone/model.hpp"
#include "scalpel/metrics.hpp"

namespace scalpel {

struct ExperimentConfig {
  BackboneConfig model;
  AadlConfig aadl;
  LossWeights loss;
  std::size_t epochs = 300;
  std::size_t batch_size = 8;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  PostprocessOptions postprocess;
  std::string graph = "kinect25";  // "kinect25" or "chain"
  std::string text_graph_path;     // optional JSON V x V matrix
  std::string embeddings_path;     // optional JSON {class_name: [C_t values]}

  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys are a ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Skeleton topology named by the config, with the text graph attached when
/// a file is given.
SkeletonGraph build_graph(const ExperimentConfig& config);

/// Reads {class_name: [values]}; throws ConfigError if a class is missing or
/// a vector has the wrong length.
TextEmbeddings load_embeddings(const std::filesystem::path& path, const std::vector<std::string>& class_names,
                               std::size_t dim);

/// Seeded unit-norm Gaussian vectors, one per class, for runs without an
/// embedding file.
TextEmbeddings random_embeddings(std::size_t classes, std::size_t dim, std::uint64_t seed);

/// Reads a JSON file; IoError if unreadable, FormatError if not JSON.
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace scalpel
