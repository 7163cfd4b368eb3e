#include <gtest/gtest.h>

#include <cmath>

#include "scalpel/errors.hpp"
#include "scalpel/harness/config.hpp"
#include "scalpel/harness/synthetic.hpp"
#include "support/oracles.hpp"

using namespace scalpel;

namespace {

std::size_t peak_bin(const std::vector<double>& x) {
  const auto spec = oracle::half_dft(x);
  std::size_t best = 1;
  for (std::size_t k = 1; k < spec.size(); ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  return best;
}

SyntheticSpec two_tone() {
  SyntheticSpec s;
  s.sample_rate = 50.0;
  s.segments = {{0, 100, {{3.0, 1.0, 0.0}}}, {1, 100, {{7.5, 1.0, 0.0}}}};
  return s;
}

}  // namespace

TEST(Synthetic, SegmentPeaksSitAtRequestedFrequency) {
  const SkeletonSequence seq = gen_synthetic(two_tone());
  ASSERT_EQ(seq.frames(), 200u);
  EXPECT_EQ(seq.boundaries, (std::vector<std::size_t>{100}));
  const auto& v = seq.data.values();
  const std::vector<double> first(v.begin(), v.begin() + 100), second(v.begin() + 100, v.end());
  // 100 frames at 50 Hz: 0.5 Hz per bin.
  const auto near = [](std::size_t bin, double hz) { return std::abs(bin * 0.5 - hz) <= 0.5; };
  EXPECT_TRUE(near(peak_bin(first), 3.0));
  EXPECT_TRUE(near(peak_bin(second), 7.5));
}

TEST(Synthetic, NoComponentsNoNoiseIsSilent) {
  SyntheticSpec s;
  s.segments = {{0, 20, {}}};
  for (double v : gen_synthetic(s).data.values()) EXPECT_EQ(v, 0.0);
}

TEST(Synthetic, SeedControlsNoise) {
  SyntheticSpec s = two_tone();
  s.noise = 0.3;
  s.seed = 4;
  const auto a = gen_synthetic(s).data.values();
  EXPECT_EQ(gen_synthetic(s).data.values(), a);
  s.seed = 5;
  EXPECT_NE(gen_synthetic(s).data.values(), a);
}

TEST(Synthetic, ComponentAtNyquistIsRejected) {
  SyntheticSpec s = two_tone();
  s.segments[0].components[0].frequency = 25.0;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_THROW(gen_synthetic(s), ConfigError);
  SyntheticSpec empty = two_tone();
  empty.segments[1].frames = 0;
  EXPECT_THROW(empty.validate(), ConfigError);
}

TEST(Synthetic, VelocityChannelDoublesChannels) {
  SyntheticSpec s = two_tone();
  s.channels = 2;
  s.joints = 3;
  s.velocity_channel = true;
  EXPECT_EQ(gen_synthetic(s).data.shape(), (Shape{4, 200, 3}));
}

TEST(SyntheticDataset, ShippedToyConfig) {
  const nlohmann::json j = read_json(SCALPEL_CONFIG_DIR "/toy_dataset.json");
  ASSERT_TRUE(is_dataset_spec(j));
  const Dataset d = gen_dataset(dataset_spec_from_json(j));
  EXPECT_EQ(d.class_names, (std::vector<std::string>{"sway", "shake"}));
  ASSERT_EQ(d.sequences.size(), 20u);
  for (const SkeletonSequence& s : d.sequences) {
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s.frames(), 256u);
    EXPECT_EQ(s.boundaries.size(), 2u);
    for (std::size_t i = 0; i < s.boundaries.size(); ++i) {
      const std::size_t b = s.boundaries[i];
      EXPECT_NE(s.labels[b], s.labels[b - 1]);
    }
  }
  EXPECT_EQ(gen_dataset(dataset_spec_from_json(j)).sequences[3].data.values(), d.sequences[3].data.values());
}

TEST(SyntheticDataset, Fig1SpecParses) {
  const nlohmann::json j = read_json(SCALPEL_CONFIG_DIR "/fig1_spec.json");
  EXPECT_FALSE(is_dataset_spec(j));
  const SkeletonSequence s = gen_synthetic(synthetic_spec_from_json(j));
  EXPECT_EQ(s.frames(), 200u);
  EXPECT_EQ(s.labels.front(), 0);
  EXPECT_EQ(s.labels.back(), 1);
}
