#include "scalpel/harness/sequence.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "scalpel/errors.hpp"
#include "scalpel/harness/container.hpp"

namespace scalpel {

namespace {
constexpr const char* kSequenceMagic = "SCALPEL-SEQ";
constexpr std::uint32_t kSequenceVersion = 1;
}  // namespace

std::vector<std::size_t> boundaries_from_labels(const std::vector<int>& labels) {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t < labels.size(); ++t) {
    if (labels[t] != labels[t - 1]) out.push_back(t);
  }
  return out;
}

void SkeletonSequence::validate() const {
  if (!data.defined() || data.rank() != 3) throw ShapeError("sequence data must be C0 x T x V");
  if (labels.size() != frames()) throw ShapeError("sequence " + id + ": label count does not match T");
  if (!(sample_rate > 0)) throw ContractError("sequence " + id + ": sample rate must be positive");
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (boundaries[i] == 0 || boundaries[i] >= frames() || (i > 0 && boundaries[i] <= boundaries[i - 1])) {
      throw BoundaryError("sequence " + id + ": boundaries must be strictly increasing inside (0, T)");
    }
  }
  // Labels may only change at a boundary.
  for (std::size_t b : boundaries_from_labels(labels)) {
    if (!std::binary_search(boundaries.begin(), boundaries.end(), b)) {
      throw BoundaryError("sequence " + id + ": label change at frame " + std::to_string(b) + " is not a boundary");
    }
  }
}

void save_sequence(const SkeletonSequence& seq, const std::filesystem::path& path) {
  seq.validate();
  Container c;
  c.header = {{"id", seq.id},
              {"sample_rate", seq.sample_rate},
              {"shape", seq.data.shape()},
              {"labels", seq.labels},
              {"boundaries", seq.boundaries}};
  c.payload = seq.data.values();
  write_container(path, kSequenceMagic, kSequenceVersion, c);
}

SkeletonSequence load_sequence(const std::filesystem::path& path) {
  Container c = read_container(path, kSequenceMagic, kSequenceVersion);
  SkeletonSequence seq;
  try {
    seq.id = c.header.at("id").get<std::string>();
    seq.sample_rate = c.header.at("sample_rate").get<double>();
    const auto shape = c.header.at("shape").get<Shape>();
    if (shape.size() != 3) throw FormatError(path.string() + ": shape must have three axes");
    if (shape_numel(shape) != c.payload.size()) throw FormatError(path.string() + ": payload does not match shape");
    seq.data = Tensor(shape, std::move(c.payload));
    seq.labels = c.header.at("labels").get<std::vector<int>>();
    seq.boundaries = c.header.at("boundaries").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": malformed header: " + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  try {
    seq.validate();
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return seq;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  nlohmann::json manifest = {{"classes", dataset.class_names}, {"sequences", nlohmann::json::array()}};
  for (const SkeletonSequence& seq : dataset.sequences) {
    save_sequence(seq, dir / (seq.id + ".seq"));
    manifest["sequences"].push_back(seq.id);
  }
  std::ofstream out(dir / "dataset.json");
  if (!out) throw IoError("cannot write " + (dir / "dataset.json").string());
  out << manifest.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  Dataset ds;
  const auto manifest_path = dir / "dataset.json";
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    try {
      ds.class_names = nlohmann::json::parse(in).at("classes").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(manifest_path.string() + ": " + e.what());
    }
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".seq") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  int max_label = -1;
  for (const auto& f : files) {
    ds.sequences.push_back(load_sequence(f));
    for (int l : ds.sequences.back().labels) max_label = std::max(max_label, l);
  }
  std::sort(ds.sequences.begin(), ds.sequences.end(),
            [](const SkeletonSequence& a, const SkeletonSequence& b) { return a.id < b.id; });
  for (int c = static_cast<int>(ds.class_names.size()); c <= max_label; ++c) {
    ds.class_names.push_back("class_" + std::to_string(c));
  }
  return ds;
}

}  // namespace scalpel
