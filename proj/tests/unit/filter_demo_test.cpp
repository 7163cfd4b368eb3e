#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "scalpel/harness/config.hpp"
#include "scalpel/harness/filter_demo.hpp"
#include "support/temp_dir.hpp"

using namespace scalpel;

namespace {

SyntheticSpec fig1_spec() { return synthetic_spec_from_json(read_json(SCALPEL_CONFIG_DIR "/fig1_spec.json")); }

}  // namespace

TEST(FilterResponse, BandsAndDefault) {
  FilterDescription f;
  f.default_gain = 1.0;
  f.bands = {{2.0, 0.25, 0.0}, {2.0, 0.25, 3.0}};
  // 100 frames at 50 Hz: bins every 0.5 Hz, bin 4 is 2 Hz.
  const auto g = f.response(100, 50.0);
  ASSERT_EQ(g.size(), 51u);
  EXPECT_EQ(g[4], 3.0);  // later band wins
  EXPECT_EQ(g[3], 1.0);
  EXPECT_EQ(g[5], 1.0);
}

TEST(FilterDemo, IdentityFilterChangesNothing) {
  const FilterDemoReport r = filter_demo(fig1_spec(), FilterDescription::identity(), AadlConfig{});
  EXPECT_NEAR(r.aadl_before, r.aadl_after, 1e-12);
  for (const auto& s : r.segments)
    for (std::size_t k = 0; k < s.before.size(); ++k) EXPECT_NEAR(s.before[k], s.after[k], 1e-15);
}

TEST(FilterDemo, AllZeroFilterSilencesEverything) {
  FilterDescription zero;
  zero.default_gain = 0.0;
  const FilterDemoReport r = filter_demo(fig1_spec(), zero, AadlConfig{});
  for (const auto& s : r.segments)
    for (double v : s.after) EXPECT_NEAR(v, 0.0, 1e-15);
  EXPECT_NEAR(r.aadl_after, -std::log(1e-12), 1e-6);
}

TEST(FilterDemo, ShippedFilterIncreasesSegmentContrast) {
  const FilterDescription f = FilterDescription::from_json(read_json(SCALPEL_CONFIG_DIR "/fig1_filter.json"));
  const FilterDemoReport r = filter_demo(fig1_spec(), f, AadlConfig{});
  ASSERT_EQ(r.segments.size(), 2u);
  EXPECT_EQ(r.segments[0].label, 0);
  EXPECT_EQ(r.segments[1].label, 1);
  EXPECT_GT(r.discrepancy_after[0], r.discrepancy_before[0]);
  EXPECT_LE(r.aadl_after, 0.5 * r.aadl_before);
  EXPECT_EQ(r.frequencies.size(), 32u);
  EXPECT_DOUBLE_EQ(r.frequencies.back(), 25.0);
}

TEST(FilterDemo, WritesCsvAndJson) {
  testing_support::TempDir dir;
  const FilterDemoReport r = filter_demo(fig1_spec(), FilterDescription::identity(), AadlConfig{});
  write_filter_demo(r, dir / "demo.csv", dir / "demo.json");
  std::ifstream in(dir / "demo.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "segment,label,bin,frequency_hz,before,after");
  EXPECT_TRUE(std::filesystem::exists(dir / "demo_aadl.csv"));
  EXPECT_EQ(read_json(dir / "demo.json").at("segments").size(), 2u);
}
