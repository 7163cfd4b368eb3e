#include "scalpel/harness/filter_demo.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "scalpel/errors.hpp"
#include "scalpel/masf.hpp"
#include "scalpel/ops.hpp"
#include "scalpel/spectrum.hpp"

namespace scalpel {

FilterDescription FilterDescription::from_json(const nlohmann::json& j) {
  try {
    FilterDescription f;
    f.default_gain = j.value("default_gain", 1.0);
    if (j.contains("bands")) {
      for (const auto& b : j.at("bands")) {
        f.bands.push_back({b.at("frequency").get<double>(), b.value("width", 0.5), b.at("gain").get<double>()});
      }
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed filter description: ") + e.what());
  }
}

std::vector<double> FilterDescription::response(std::size_t frames, double sample_rate) const {
  const std::size_t S = half_spectrum_length(frames);
  std::vector<double> gains(S, default_gain);
  for (std::size_t k = 0; k < S; ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(frames);
    for (const FilterBand& b : bands) {
      if (std::abs(f - b.frequency) <= b.width) gains[k] = b.gain;
    }
  }
  return gains;
}

namespace {

std::vector<double> average_spectrum(const Tensor& values) {
  const std::size_t C = values.dim(0), S = values.dim(1), V = values.dim(2);
  std::vector<double> out(S, 0.0);
  const auto& x = values.values();
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t v = 0; v < V; ++v) out[s] += x[(c * S + s) * V + v] / static_cast<double>(C * V);
  return out;
}

}  // namespace

FilterDemoReport filter_demo(const SyntheticSpec& spec, const FilterDescription& filter, const AadlConfig& aadl) {
  NoGradGuard guard;
  const SkeletonSequence seq = gen_synthetic(spec);
  const std::size_t T = seq.frames(), V = seq.joints();
  const std::size_t S = half_spectrum_length(T);

  // One filter at full spectral resolution, so the NNI stretch is the identity.
  const std::vector<double> gains = filter.response(T, seq.sample_rate);
  std::vector<double> weights(S * V);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t v = 0; v < V; ++v) weights[s * V + v] = gains[s];
  MasfParams bank;
  bank.config = MasfConfig{1, S, 1, 1};
  bank.filters.push_back(SpectralFilter{Tensor({1, S, V}, std::move(weights))});
  const Tensor filtered = apply_filter_bank(seq.data, bank).front();

  FilterDemoReport report;
  const std::size_t Sf = aadl.spectral_length;
  for (std::size_t i = 0; i < Sf; ++i) {
    report.frequencies.push_back(Sf > 1 ? static_cast<double>(i) * seq.sample_rate / 2.0 / static_cast<double>(Sf - 1)
                                        : 0.0);
  }
  const auto before_segments = split_by_boundaries(seq.data, seq.boundaries);
  const auto after_segments = split_by_boundaries(filtered, seq.boundaries);
  std::vector<SegmentSpectrum> before, after;
  for (std::size_t n = 0; n < before_segments.size(); ++n) {
    before.push_back(segment_spectrum(before_segments[n], Sf));
    after.push_back(segment_spectrum(after_segments[n], Sf));
    const std::size_t start = n == 0 ? 0 : seq.boundaries[n - 1];
    report.segments.push_back({seq.labels[start], average_spectrum(before.back().values),
                               average_spectrum(after.back().values)});
  }
  const AadlResult b = aadl_loss(before, aadl.alpha);
  const AadlResult a = aadl_loss(after, aadl.alpha);
  report.aadl_before = b.loss.item();
  report.aadl_after = a.loss.item();
  report.discrepancy_before = b.discrepancies;
  report.discrepancy_after = a.discrepancies;
  return report;
}

nlohmann::json to_json(const FilterDemoReport& r) {
  nlohmann::json segments = nlohmann::json::array();
  for (const SegmentSpectra& s : r.segments) {
    segments.push_back({{"label", s.label}, {"before", s.before}, {"after", s.after}});
  }
  return {{"frequencies", r.frequencies},
          {"segments", segments},
          {"aadl_before", r.aadl_before},
          {"aadl_after", r.aadl_after},
          {"discrepancy_before", r.discrepancy_before},
          {"discrepancy_after", r.discrepancy_after}};
}

void write_filter_demo(const FilterDemoReport& report, const std::filesystem::path& csv,
                       const std::filesystem::path& json) {
  std::ofstream out(csv);
  if (!out) throw IoError("cannot write " + csv.string());
  out << "segment,label,bin,frequency_hz,before,after\n";
  char buf[256];
  for (std::size_t n = 0; n < report.segments.size(); ++n) {
    const SegmentSpectra& s = report.segments[n];
    for (std::size_t i = 0; i < s.before.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%d,%zu,%.6g,%.10g,%.10g\n", n, s.label, i, report.frequencies[i],
                    s.before[i], s.after[i]);
      out << buf;
    }
  }
  const auto summary = csv.parent_path() / (csv.stem().string() + "_aadl.csv");
  std::ofstream sum(summary);
  if (!sum) throw IoError("cannot write " + summary.string());
  sum << "stage,aadl\n";
  std::snprintf(buf, sizeof buf, "before,%.10g\nafter,%.10g\n", report.aadl_before, report.aadl_after);
  sum << buf;
  if (!json.empty()) {
    std::ofstream j(json);
    if (!j) throw IoError("cannot write " + json.string());
    j << to_json(report).dump(2) << '\n';
  }
}

}  // namespace scalpel
