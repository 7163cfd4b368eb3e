#include "scalpel/harness/checkpoint.hpp"

#include <algorithm>
#include <map>

#include "scalpel/errors.hpp"
#include "scalpel/harness/container.hpp"

namespace scalpel {

namespace {
constexpr const char* kCheckpointMagic = "SCALPEL-CKPT";
constexpr std::uint32_t kCheckpointVersion = 1;
}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ExperimentConfig& config,
                     const std::vector<std::string>& class_names, const ParamList& params) {
  Container c;
  nlohmann::json table = nlohmann::json::array();
  for (const NamedTensor& p : params) {
    table.push_back({{"name", p.name}, {"shape", p.tensor.shape()}, {"offset", c.payload.size()}});
    c.payload.insert(c.payload.end(), p.tensor.values().begin(), p.tensor.values().end());
  }
  c.header = {{"config", to_json(config)}, {"classes", class_names}, {"tensors", table}};
  write_container(path, kCheckpointMagic, kCheckpointVersion, c);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const Container c = read_container(path, kCheckpointMagic, kCheckpointVersion);
  Checkpoint ck;
  try {
    ck.config = config_from_json(c.header.at("config"));
    ck.class_names = c.header.at("classes").get<std::vector<std::string>>();
    for (const auto& entry : c.header.at("tensors")) {
      const auto shape = entry.at("shape").get<Shape>();
      const auto offset = entry.at("offset").get<std::size_t>();
      const std::size_t n = shape_numel(shape);
      if (offset > c.payload.size() || n > c.payload.size() - offset) {
        throw FormatError(path.string() + ": tensor table points past the payload");
      }
      std::vector<double> values(c.payload.begin() + static_cast<long>(offset),
                                 c.payload.begin() + static_cast<long>(offset + n));
      ck.tensors.push_back({entry.at("name").get<std::string>(), Tensor(shape, std::move(values))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": malformed checkpoint header: " + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return ck;
}

void bind_parameters(Backbone& model, const Checkpoint& checkpoint) {
  std::map<std::string, const Tensor*> stored;
  for (const NamedTensor& t : checkpoint.tensors) stored[t.name] = &t.tensor;
  for (NamedTensor& p : model.parameters()) {
    auto it = stored.find(p.name);
    if (it == stored.end()) throw ShapeError("checkpoint has no tensor '" + p.name + "'");
    if (it->second->shape() != p.tensor.shape()) {
      throw ShapeError("tensor '" + p.name + "' is " + shape_str(it->second->shape()) + " in the checkpoint but " +
                       shape_str(p.tensor.shape()) + " in the model");
    }
    const auto& src = it->second->values();
    std::copy(src.begin(), src.end(), p.tensor.mutable_data().begin());
  }
}

Backbone model_from_checkpoint(const Checkpoint& checkpoint) {
  Backbone model(checkpoint.config.model, build_graph(checkpoint.config), checkpoint.config.seed);
  bind_parameters(model, checkpoint);
  return model;
}

}  // namespace scalpel
