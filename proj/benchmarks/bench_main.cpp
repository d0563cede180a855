#include <benchmark/benchmark.h>

#include <random>

#include "sketch/layers.hpp"
#include "sketch/losses.hpp"
#include "sketch/network.hpp"

namespace {

using namespace sketch;

Tensor noise(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor t(shape);
  for (double& v : t.data()) v = u(rng);
  return t;
}

ConvParams random_conv(std::size_t out, std::size_t in, std::size_t k) {
  ConvParams p(out, in, k, k);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.01);
  for (double& v : p.kernel) v = g(rng);
  return p;
}

// 5x5 valid convolution, 32 -> 32 channels, on a square map of side range(0).
void BM_Conv5x5(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const Tensor x = noise({32, side, side}, 2);
  const ConvParams p = random_conv(32, 32, 5);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, p));
}
BENCHMARK(BM_Conv5x5)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Conv5x5Backward(benchmark::State& state) {
  const Tensor x = noise({32, 32, 32}, 3);
  const ConvParams p = random_conv(32, 32, 5);
  const Tensor g = noise({32, 28, 28}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_backward(x, p, g));
}
BENCHMARK(BM_Conv5x5Backward)->Unit(benchmark::kMillisecond);

// Full-frame forward through the branched network with one trunk shared by
// both branches against each branch recomputing its own trunk.
void BM_BfcnShared(benchmark::State& state) {
  const NetworkSpec spec = bfcn_spec(2);
  const NetworkWeights w = init_weights(spec, 5);
  const Tensor x = noise({2, 250, 200}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(bfcn_forward(x, spec, w));
}
BENCHMARK(BM_BfcnShared)->Unit(benchmark::kMillisecond);

void BM_BfcnUnshared(benchmark::State& state) {
  const NetworkSpec spec = bfcn_spec(2);
  const NetworkWeights w = init_weights(spec, 5);
  const Tensor x = noise({2, 250, 200}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(bfcn_forward_unshared(x, spec, w));
}
BENCHMARK(BM_BfcnUnshared)->Unit(benchmark::kMillisecond);

// Sorted-matching loss on an output patch of side range(0).
void BM_SmMse(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const Tensor a = noise({1, side, side}, 7), b = noise({1, side, side}, 8);
  for (auto _ : state) benchmark::DoNotOptimize(sm_mse(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_SmMse)->Arg(20)->Arg(188);

void BM_Mse(benchmark::State& state) {
  const Tensor a = noise({1, 188, 188}, 7), b = noise({1, 188, 188}, 8);
  for (auto _ : state) benchmark::DoNotOptimize(mse(a, b));
}
BENCHMARK(BM_Mse);

}  // namespace

BENCHMARK_MAIN();
