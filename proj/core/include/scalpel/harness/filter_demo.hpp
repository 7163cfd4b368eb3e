#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalpel/aadl.hpp"
#include "scalpel/harness/synthetic.hpp"

namespace scalpel {

/// Gain applied to every bin whose centre lies within `width` Hz of `frequency`.
struct FilterBand {
  double frequency = 0.0;
  double width = 0.5;
  double gain = 1.0;
};

/// Hand-written frequency response; bins outside every band get `default_gain`.
/// When bands overlap the last one listed wins.
struct FilterDescription {
  double default_gain = 1.0;
  std::vector<FilterBand> bands;

  static FilterDescription identity() { return {}; }
  static FilterDescription from_json(const nlohmann::json& j);
  /// Gain per rfft bin k (frequency k * sample_rate / frames).
  std::vector<double> response(std::size_t frames, double sample_rate) const;
};

struct SegmentSpectra {
  int label = 0;
  std::vector<double> before;  // S_f amplitudes averaged over channels and joints
  std::vector<double> after;
};

struct FilterDemoReport {
  std::vector<double> frequencies;  // approximate Hz of each resampled bin
  std::vector<SegmentSpectra> segments;
  double aadl_before = 0.0;
  double aadl_after = 0.0;
  std::vector<double> discrepancy_before;
  std::vector<double> discrepancy_after;
};

/// Generates the sequence, filters it through the MASF filter-bank path with
/// a single full-resolution filter, and measures per-segment spectra and
/// AADL before and after.
FilterDemoReport filter_demo(const SyntheticSpec& spec, const FilterDescription& filter, const AadlConfig& aadl);

/// CSV of spectra (`segment,label,bin,frequency_hz,before,after`), a sibling
/// `<stem>_aadl.csv`, and optionally the whole report as JSON plot data.
void write_filter_demo(const FilterDemoReport& report, const std::filesystem::path& csv,
                       const std::filesystem::path& json = {});

nlohmann::json to_json(const FilterDemoReport& report);

}  // namespace scalpel
