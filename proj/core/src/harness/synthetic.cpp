#include "scalpel/harness/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "scalpel/errors.hpp"

namespace scalpel {

using nlohmann::json;

namespace {

void check_components(const std::vector<CosineComponent>& components, double sample_rate) {
  for (const CosineComponent& c : components) {
    if (!(c.frequency >= 0.0) || c.frequency >= sample_rate / 2.0) {
      throw ConfigError("component at " + std::to_string(c.frequency) + " Hz is not below Nyquist (" +
                        std::to_string(sample_rate / 2.0) + " Hz)");
    }
  }
}

double evaluate(const std::vector<CosineComponent>& components, double time, double phase_offset) {
  double s = 0.0;
  for (const CosineComponent& c : components) {
    s += c.amplitude * std::cos(2.0 * std::numbers::pi * c.frequency * time + c.phase + phase_offset);
  }
  return s;
}

std::vector<CosineComponent> components_from_json(const json& j) {
  std::vector<CosineComponent> out;
  for (const json& c : j) {
    out.push_back({c.at("frequency").get<double>(), c.value("amplitude", 1.0), c.value("phase", 0.0)});
  }
  return out;
}

template <typename F>
auto parse_spec(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

void SyntheticSpec::validate() const {
  if (!(sample_rate > 0)) throw ConfigError("sample rate must be positive");
  if (channels == 0 || joints == 0) throw ConfigError("channels and joints must be positive");
  if (segments.empty()) throw ConfigError("synthetic spec needs at least one segment");
  if (noise < 0 || joint_variation < 0) throw ConfigError("noise and joint_variation must be non-negative");
  check_components(shared, sample_rate);
  for (const SegmentSpec& s : segments) {
    if (s.frames == 0) throw ConfigError("segments must be at least one frame long");
    if (s.label < 0) throw ConfigError("segment labels must be non-negative");
    check_components(s.components, sample_rate);
  }
}

SkeletonSequence gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::size_t T = 0;
  for (const SegmentSpec& s : spec.segments) T += s.frames;
  const std::size_t C = spec.channels, V = spec.joints;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> gain(C * V, 1.0), offset(C * V, 0.0);
  if (spec.joint_variation > 0) {
    for (std::size_t i = 0; i < C * V; ++i) {
      gain[i] = 1.0 + spec.joint_variation * unit(rng);
      offset[i] = spec.joint_variation * std::numbers::pi * unit(rng);
    }
  }

  SkeletonSequence seq;
  seq.id = spec.id;
  seq.sample_rate = spec.sample_rate;
  seq.labels.reserve(T);
  std::vector<const SegmentSpec*> owner;
  owner.reserve(T);
  for (const SegmentSpec& s : spec.segments) {
    if (!seq.labels.empty() && seq.labels.back() != s.label) seq.boundaries.push_back(seq.labels.size());
    seq.labels.insert(seq.labels.end(), s.frames, s.label);
    owner.insert(owner.end(), s.frames, &s);
  }

  const std::size_t C0 = spec.velocity_channel ? 2 * C : C;
  std::vector<double> data(C0 * T * V, 0.0);
  std::normal_distribution<double> normal(0.0, spec.noise > 0 ? spec.noise : 1.0);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t t = 0; t < T; ++t) {
      const double time = static_cast<double>(t) / spec.sample_rate;
      for (std::size_t v = 0; v < V; ++v) {
        const std::size_t k = c * V + v;
        double x = evaluate(spec.shared, time, offset[k]) + evaluate(owner[t]->components, time, offset[k]);
        x *= gain[k];
        if (spec.noise > 0) x += normal(rng);
        data[(c * T + t) * V + v] = x;
      }
    }
  }
  if (spec.velocity_channel) {
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t t = 1; t < T; ++t) {
        for (std::size_t v = 0; v < V; ++v) {
          data[((C + c) * T + t) * V + v] = data[(c * T + t) * V + v] - data[(c * T + t - 1) * V + v];
        }
      }
    }
  }
  seq.data = Tensor({C0, T, V}, std::move(data));
  return seq;
}

void DatasetSpec::validate() const {
  if (classes.size() < 2) throw ConfigError("dataset spec needs at least two classes");
  if (sequences == 0 || segments_per_sequence == 0) throw ConfigError("dataset spec needs sequences and segments");
  if (frames < 2 * segments_per_sequence) throw ConfigError("too few frames for the requested segments");
  if (!(duration_jitter >= 0 && duration_jitter < 1)) throw ConfigError("duration_jitter must lie in [0, 1)");
  check_components(shared, sample_rate);
  for (const ClassSpec& c : classes) check_components(c.components, sample_rate);
}

Dataset gen_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset ds;
  for (const ClassSpec& c : spec.classes) ds.class_names.push_back(c.name);
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.segments_per_sequence;
  const double mean_len = static_cast<double>(spec.frames) / static_cast<double>(n);
  const int classes = static_cast<int>(spec.classes.size());

  for (std::size_t i = 0; i < spec.sequences; ++i) {
    SyntheticSpec s;
    char id[32];
    std::snprintf(id, sizeof id, "seq_%04zu", i);
    s.id = id;
    s.sample_rate = spec.sample_rate;
    s.channels = spec.channels;
    s.joints = spec.joints;
    s.shared = spec.shared;
    s.noise = spec.noise;
    s.joint_variation = spec.joint_variation;
    s.velocity_channel = spec.velocity_channel;

    std::uniform_real_distribution<double> jitter(-spec.duration_jitter, spec.duration_jitter);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::size_t used = 0;
    int previous = -1;
    for (std::size_t k = 0; k < n; ++k) {
      SegmentSpec seg;
      if (k + 1 == n) {
        seg.frames = spec.frames - used;
      } else {
        seg.frames = static_cast<std::size_t>(std::lround(mean_len * (1.0 + jitter(rng))));
        const std::size_t room = spec.frames - used - (n - k - 1);  // leave a frame per later segment
        seg.frames = std::clamp<std::size_t>(seg.frames, 1, room);
      }
      used += seg.frames;
      // Each segment differs from its predecessor.
      std::uniform_int_distribution<int> pick(0, previous < 0 ? classes - 1 : classes - 2);
      int label = pick(rng);
      if (previous >= 0 && label >= previous) ++label;
      seg.label = label;
      previous = label;
      seg.components = spec.classes[static_cast<std::size_t>(label)].components;
      for (CosineComponent& c : seg.components) c.phase += phase(rng);
      s.segments.push_back(std::move(seg));
    }
    s.seed = rng();
    ds.sequences.push_back(gen_synthetic(s));
  }
  return ds;
}

bool is_dataset_spec(const json& j) { return j.is_object() && j.contains("classes"); }

SyntheticSpec synthetic_spec_from_json(const json& j) {
  return parse_spec("synthetic spec", [&] {
    SyntheticSpec s;
    s.id = j.value("id", s.id);
    s.sample_rate = j.value("sample_rate", s.sample_rate);
    s.channels = j.value("channels", s.channels);
    s.joints = j.value("joints", s.joints);
    if (j.contains("shared")) s.shared = components_from_json(j.at("shared"));
    for (const json& seg : j.at("segments")) {
      SegmentSpec out;
      out.label = seg.at("label").get<int>();
      out.frames = seg.at("frames").get<std::size_t>();
      if (seg.contains("components")) out.components = components_from_json(seg.at("components"));
      s.segments.push_back(std::move(out));
    }
    s.noise = j.value("noise", s.noise);
    s.joint_variation = j.value("joint_variation", s.joint_variation);
    s.velocity_channel = j.value("velocity_channel", s.velocity_channel);
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
  });
}

DatasetSpec dataset_spec_from_json(const json& j) {
  return parse_spec("dataset spec", [&] {
    DatasetSpec s;
    for (const json& c : j.at("classes")) {
      s.classes.push_back({c.at("name").get<std::string>(), components_from_json(c.at("components"))});
    }
    if (j.contains("shared")) s.shared = components_from_json(j.at("shared"));
    s.sequences = j.value("sequences", s.sequences);
    s.frames = j.value("frames", s.frames);
    s.segments_per_sequence = j.value("segments_per_sequence", s.segments_per_sequence);
    s.duration_jitter = j.value("duration_jitter", s.duration_jitter);
    s.sample_rate = j.value("sample_rate", s.sample_rate);
    s.channels = j.value("channels", s.channels);
    s.joints = j.value("joints", s.joints);
    s.noise = j.value("noise", s.noise);
    s.joint_variation = j.value("joint_variation", s.joint_variation);
    s.velocity_channel = j.value("velocity_channel", s.velocity_channel);
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
  });
}

}  // namespace scalpel
