#include <benchmark/benchmark.h>

#include <random>

#include "scalpel/backbone/model.hpp"
#include "scalpel/facm.hpp"
#include "scalpel/fft.hpp"
#include "scalpel/masf.hpp"
#include "scalpel/ops.hpp"
#include "scalpel/spectrum.hpp"

using namespace scalpel;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return Tensor(std::move(shape), std::move(v));
}

void BM_ComplexFft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<fft::Complex> data(n, fft::Complex(1.0, 0.5));
  for (auto _ : state) {
    fft::transform(data, false);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetComplexityN(state.range(0));
}
// Powers of two take the radix-2 path; the others go through Bluestein.
BENCHMARK(BM_ComplexFft)->Arg(64)->Arg(100)->Arg(256)->Arg(1000)->Arg(1024)->Arg(4096);

void BM_RfftRoundTrip(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  const Tensor x = random_tensor({64, T, 25}, 1);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(irfft(rfft(x, 1), T));
}
BENCHMARK(BM_RfftRoundTrip)->Arg(128)->Arg(500);

void BM_MasfForward(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  Initializer init(1);
  const MasfParams p = MasfParams::init(MasfConfig{}, 64, 25, init);
  const Tensor x = random_tensor({64, T, 25}, 2);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(masf_forward(x, p));
}
BENCHMARK(BM_MasfForward)->Arg(128)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_FacmForward(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  const FacmParams p = FacmParams::identity(64);
  const Tensor x = random_tensor({64, T}, 3);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(facm_forward(x, p));
}
BENCHMARK(BM_FacmForward)->Arg(500)->Arg(2000);

void BM_BackboneForward(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  BackboneConfig cfg;
  cfg.in_channels = 4;
  cfg.joints = 4;
  cfg.channels = 16;
  cfg.scales = 2;
  cfg.graph_channels = 4;
  cfg.attention_channels = 8;
  cfg.fusion_channels = 4;
  cfg.text_dim = 16;
  cfg.temporal_blocks = 2;
  cfg.refine_layers = 2;
  cfg.masf = MasfConfig{4, 16, 16, 2};
  const Backbone model(cfg, SkeletonGraph::chain(4), 0);
  const Tensor x = random_tensor({4, T, 4}, 4);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x));
}
BENCHMARK(BM_BackboneForward)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
