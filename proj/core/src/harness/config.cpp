#include "scalpel/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "scalpel/errors.hpp"

namespace scalpel {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  model.validate();
  if (aadl.spectral_length == 0 || !(aadl.alpha > 0)) throw ConfigError("AADL needs S_f > 0 and alpha > 0");
  loss.validate();
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (!(learning_rate > 0)) throw ConfigError("learning rate must be positive");
  if (!(train_fraction > 0 && train_fraction <= 1)) throw ConfigError("train_fraction must lie in (0, 1]");
  if (graph != "kinect25" && graph != "chain") throw ConfigError("graph must be 'kinect25' or 'chain'");
}

json to_json(const ExperimentConfig& c) {
  const BackboneConfig& m = c.model;
  return json{
      {"model",
       {{"in_channels", m.in_channels},
        {"joints", m.joints},
        {"classes", m.classes},
        {"channels", m.channels},
        {"scales", m.scales},
        {"graph_channels", m.graph_channels},
        {"attention_channels", m.attention_channels},
        {"fusion_channels", m.fusion_channels},
        {"text_dim", m.text_dim},
        {"temporal_blocks", m.temporal_blocks},
        {"class_stages", m.class_stages},
        {"boundary_stages", m.boundary_stages},
        {"refine_layers", m.refine_layers},
        {"adjacency_eps", m.adjacency_eps},
        {"bn_eps", m.bn_eps},
        {"use_masf", m.use_masf},
        {"use_facm", m.use_facm},
        {"masf",
         {{"num_filters", m.masf.num_filters},
          {"max_filter_length", m.masf.max_filter_length},
          {"pool_length", m.masf.pool_length},
          {"projection_dim", m.masf.projection_dim}}}}},
      {"aadl", {{"spectral_length", c.aadl.spectral_length}, {"alpha", c.aadl.alpha}}},
      {"loss",
       {{"lambda1", c.loss.lambda1},
        {"lambda2", c.loss.lambda2},
        {"lambda3", c.loss.lambda3},
        {"sigma", c.loss.sigma},
        {"tau", c.loss.tau}}},
      {"train",
       {{"epochs", c.epochs},
        {"batch_size", c.batch_size},
        {"learning_rate", c.learning_rate},
        {"seed", c.seed},
        {"train_fraction", c.train_fraction}}},
      {"postprocess",
       {{"boundary_threshold", c.postprocess.boundary_threshold}, {"min_gap", c.postprocess.min_gap}}},
      {"graph", c.graph},
      {"text_graph", c.text_graph_path},
      {"embeddings", c.embeddings_path}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  reject_unknown(j, {"model", "aadl", "loss", "train", "postprocess", "graph", "text_graph", "embeddings"}, "config");
  if (j.contains("model")) {
    const json& m = j.at("model");
    reject_unknown(m,
                   {"in_channels", "joints", "classes", "channels", "scales", "graph_channels",
                    "attention_channels", "fusion_channels", "text_dim", "temporal_blocks", "class_stages",
                    "boundary_stages", "refine_layers", "adjacency_eps", "bn_eps", "use_masf", "use_facm", "masf"},
                   "model");
    BackboneConfig& b = c.model;
    read(m, "in_channels", b.in_channels);
    read(m, "joints", b.joints);
    read(m, "classes", b.classes);
    read(m, "channels", b.channels);
    read(m, "scales", b.scales);
    read(m, "graph_channels", b.graph_channels);
    read(m, "attention_channels", b.attention_channels);
    read(m, "fusion_channels", b.fusion_channels);
    read(m, "text_dim", b.text_dim);
    read(m, "temporal_blocks", b.temporal_blocks);
    read(m, "class_stages", b.class_stages);
    read(m, "boundary_stages", b.boundary_stages);
    read(m, "refine_layers", b.refine_layers);
    read(m, "adjacency_eps", b.adjacency_eps);
    read(m, "bn_eps", b.bn_eps);
    read(m, "use_masf", b.use_masf);
    read(m, "use_facm", b.use_facm);
    if (m.contains("masf")) {
      const json& f = m.at("masf");
      reject_unknown(f, {"num_filters", "max_filter_length", "pool_length", "projection_dim"}, "model.masf");
      read(f, "num_filters", b.masf.num_filters);
      read(f, "max_filter_length", b.masf.max_filter_length);
      read(f, "pool_length", b.masf.pool_length);
      read(f, "projection_dim", b.masf.projection_dim);
    }
  }
  if (j.contains("aadl")) {
    reject_unknown(j.at("aadl"), {"spectral_length", "alpha"}, "aadl");
    read(j.at("aadl"), "spectral_length", c.aadl.spectral_length);
    read(j.at("aadl"), "alpha", c.aadl.alpha);
  }
  if (j.contains("loss")) {
    const json& l = j.at("loss");
    reject_unknown(l, {"lambda1", "lambda2", "lambda3", "sigma", "tau"}, "loss");
    read(l, "lambda1", c.loss.lambda1);
    read(l, "lambda2", c.loss.lambda2);
    read(l, "lambda3", c.loss.lambda3);
    read(l, "sigma", c.loss.sigma);
    read(l, "tau", c.loss.tau);
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown(t, {"epochs", "batch_size", "learning_rate", "seed", "train_fraction"}, "train");
    read(t, "epochs", c.epochs);
    read(t, "batch_size", c.batch_size);
    read(t, "learning_rate", c.learning_rate);
    read(t, "seed", c.seed);
    read(t, "train_fraction", c.train_fraction);
  }
  if (j.contains("postprocess")) {
    const json& p = j.at("postprocess");
    reject_unknown(p, {"boundary_threshold", "min_gap"}, "postprocess");
    read(p, "boundary_threshold", c.postprocess.boundary_threshold);
    read(p, "min_gap", c.postprocess.min_gap);
  }
  read(j, "graph", c.graph);
  read(j, "text_graph", c.text_graph_path);
  read(j, "embeddings", c.embeddings_path);
  c.validate();
  return c;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

SkeletonGraph build_graph(const ExperimentConfig& config) {
  SkeletonGraph g = config.graph == "kinect25" ? SkeletonGraph::kinect25() : SkeletonGraph::chain(config.model.joints);
  if (g.joints != config.model.joints) {
    throw ConfigError("graph '" + config.graph + "' has " + std::to_string(g.joints) + " joints, config says " +
                      std::to_string(config.model.joints));
  }
  if (!config.text_graph_path.empty()) {
    const json j = read_json(config.text_graph_path);
    std::vector<std::vector<double>> rows;
    try {
      rows = j.get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
      throw FormatError(config.text_graph_path + ": " + e.what());
    }
    const std::size_t V = g.joints;
    if (rows.size() != V) throw ShapeError("text graph must be V x V");
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (r.size() != V) throw ShapeError("text graph must be V x V");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    g.text_graph = Tensor({V, V}, std::move(flat));
  }
  return g;
}

TextEmbeddings load_embeddings(const std::filesystem::path& path, const std::vector<std::string>& class_names,
                               std::size_t dim) {
  const json j = read_json(path);
  TextEmbeddings out;
  out.dim = dim;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    if (!j.contains(class_names[c])) throw ConfigError(path.string() + ": no embedding for '" + class_names[c] + "'");
    std::vector<double> v;
    try {
      v = j.at(class_names[c]).get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
    if (v.size() != dim) {
      throw ConfigError("embedding for '" + class_names[c] + "' has " + std::to_string(v.size()) +
                        " values, expected " + std::to_string(dim));
    }
    out.vectors[static_cast<int>(c)] = std::move(v);
  }
  return out;
}

TextEmbeddings random_embeddings(std::size_t classes, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  TextEmbeddings out;
  out.dim = dim;
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<double> v(dim);
    double norm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    out.vectors[static_cast<int>(c)] = std::move(v);
  }
  return out;
}

}  // namespace scalpel
