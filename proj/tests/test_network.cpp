#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "sketch/gradcheck.hpp"
#include "sketch/io.hpp"
#include "sketch/network.hpp"
#include "support/fixtures.hpp"

namespace sketch {
namespace {

using testing::random_tensor;
using testing::scratch_dir;

TEST(NetworkSpec, BfcnLayout) {
  const NetworkSpec spec = bfcn_spec(2);
  EXPECT_EQ(spec.conv_count(), 9u);
  ASSERT_FALSE(spec.trunk.empty());
  EXPECT_EQ(spec.trunk.front().in_channels, 2u);
  EXPECT_EQ(spec.trunk.front().kernel, 5u);
  EXPECT_EQ(spec.structural.back().out_channels, 1u);
  EXPECT_EQ(spec.textural.back().out_channels, 1u);
  for (const auto* seq : {&spec.trunk, &spec.structural, &spec.textural})
    for (const LayerSpec& l : *seq) EXPECT_EQ(l.pad, 0u);
  EXPECT_NE(spec.hash(), bfcn_spec(4).hash());
  EXPECT_EQ(spec.hash(), bfcn_spec(2).hash());
}

TEST(NetworkSpec, PnetLayout) {
  const NetworkSpec spec = pnet_spec(4);
  EXPECT_EQ(spec.conv_count(), 8u);
  std::size_t pools = 0;
  for (const LayerSpec& l : spec.trunk) {
    if (l.kind == LayerKind::conv) EXPECT_EQ(l.pad, l.kernel / 2);
    if (l.kind == LayerKind::maxpool) ++pools;
  }
  EXPECT_EQ(pools, 1u);
  EXPECT_EQ(spec.trunk.back().out_channels, 3u);
}

TEST(Init, DeterministicWithZeroBiases) {
  const NetworkSpec spec = bfcn_spec(2);
  const NetworkWeights a = init_weights(spec, 42), b = init_weights(spec, 42);
  EXPECT_TRUE(a.same_parameters(b));
  EXPECT_FALSE(a.same_parameters(init_weights(spec, 43)));
  for (const ConvParams& l : a.layers)
    for (double v : l.bias) EXPECT_EQ(v, 0.0);
  EXPECT_NO_THROW(check_weights(spec, a));
}

TEST(Init, KernelSpreadMatchesStddev) {
  BfcnWidths wide;
  wide.trunk = {64, 64, 64};
  const NetworkWeights w = init_weights(bfcn_spec(2, wide), 7, 0.01);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const ConvParams& l : w.layers)
    for (double v : l.kernel) {
      sum += v;
      sq += v * v;
      ++n;
    }
  ASSERT_GE(n, 100000u);
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(sd, 0.01, 0.0005);
  EXPECT_NEAR(mean, 0.0, 0.0002);
}

TEST(Bfcn, ShapeLaw) {
  const NetworkSpec spec = bfcn_spec(2);
  const NetworkWeights w = init_weights(spec, 1);
  std::mt19937_64 rng(1);
  const BfcnOutput full = bfcn_forward(random_tensor({2, 250, 200}, rng, 0, 1), spec, w);
  EXPECT_EQ(full.structural.shape(), (Shape{1, 238, 188}));
  EXPECT_EQ(full.textural.shape(), (Shape{1, 238, 188}));
  const BfcnOutput patch = bfcn_forward(random_tensor({2, 32, 32}, rng, 0, 1), spec, w);
  EXPECT_EQ(patch.structural.shape(), (Shape{1, 20, 20}));
  EXPECT_THROW(bfcn_forward(Tensor(2, 12, 12), spec, w), ShapeError);
  EXPECT_THROW(bfcn_forward(Tensor(3, 32, 32), spec, w), ShapeError);
}

TEST(Bfcn, ZeroWeightsGiveZeros) {
  const NetworkSpec spec = bfcn_spec(2);
  std::mt19937_64 rng(2);
  const BfcnOutput out = bfcn_forward(random_tensor({2, 40, 30}, rng), spec, zero_weights(spec));
  for (double v : out.structural.data()) EXPECT_EQ(v, 0.0);
  for (double v : out.textural.data()) EXPECT_EQ(v, 0.0);
}

TEST(Bfcn, SharedTrunkMatchesIsolatedNetworks) {
  const NetworkSpec spec = bfcn_spec(4);
  const NetworkWeights w = init_weights(spec, 3, 0.1);
  std::mt19937_64 rng(3);
  const Tensor x = random_tensor({4, 36, 33}, rng, 0, 1);
  const BfcnOutput a = bfcn_forward(x, spec, w), b = bfcn_forward_unshared(x, spec, w);
  EXPECT_EQ(a.structural, b.structural);
  EXPECT_EQ(a.textural, b.textural);
}

TEST(Bfcn, Gradients) {
  const GradCheckReport r = run_gradcheck_target("bfcn-tiny", 11);
  EXPECT_TRUE(r.passed()) << r.max_rel_error;
}

TEST(Pnet, ContractAtCanonicalSize) {
  const NetworkSpec spec = pnet_spec(4);
  std::mt19937_64 rng(4);
  const ParsingMap p =
      pnet_forward(random_tensor({4, 200, 156}, rng, 0, 1), spec, init_weights(spec, 4));
  EXPECT_EQ(p.height(), 100u);
  EXPECT_EQ(p.width(), 78u);
  EXPECT_TRUE(p.is_simplex(1e-6));
}

TEST(Pnet, ZeroWeightsGiveUniform) {
  const NetworkSpec spec = pnet_spec(2);
  std::mt19937_64 rng(5);
  const ParsingMap p = pnet_forward(random_tensor({2, 20, 16}, rng), spec, zero_weights(spec));
  for (double v : p.probs.data()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
  EXPECT_THROW(pnet_forward(Tensor(2, 21, 16), spec, zero_weights(spec)), ShapeError);
}

TEST(Pnet, Gradients) {
  const GradCheckReport r = run_gradcheck_target("pnet-tiny", 12);
  EXPECT_TRUE(r.passed()) << r.max_rel_error;
}

TEST(Weights, RoundTripIsExact) {
  const auto dir = scratch_dir("weights_rt");
  for (const NetworkSpec& spec : {bfcn_spec(2), pnet_spec(4)}) {
    const NetworkWeights w = init_weights(spec, 9);
    save_weights(w, dir / "w.bin");
    EXPECT_TRUE(load_weights(dir / "w.bin", spec).same_parameters(w));
  }
}

TEST(Weights, HeaderLayout) {
  const NetworkSpec spec = bfcn_spec(2);
  std::ostringstream out;
  write_weights(init_weights(spec, 1), out);
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, 4), "SKWT");
  std::size_t expected = 20;
  for (const ConvParams& l : zero_weights(spec).layers) expected += 16 + 4 * l.parameter_count();
  EXPECT_EQ(s.size(), expected);
}

TEST(Weights, RejectsDamage) {
  const auto dir = scratch_dir("weights_bad");
  const NetworkSpec spec = bfcn_spec(2);
  std::ostringstream out;
  write_weights(init_weights(spec, 1), out);
  const std::string good = out.str();
  auto write = [&](const std::string& bytes) {
    std::ofstream(dir / "w.bin", std::ios::binary) << bytes;
    return dir / "w.bin";
  };

  EXPECT_THROW(load_weights(write(good.substr(0, good.size() - 3)), spec), FormatError);
  EXPECT_THROW(load_weights(write(good + "x"), spec), FormatError);
  std::string magic = good;
  magic[0] = 'X';
  EXPECT_THROW(load_weights(write(magic), spec), FormatError);
  EXPECT_THROW(load_weights(write(good), bfcn_spec(4)), IncompatibleWeights);
  EXPECT_THROW(load_weights(write(good), pnet_spec(2)), IncompatibleWeights);
  EXPECT_THROW(load_weights(dir / "missing.bin", spec), FormatError);
}

}  // namespace
}  // namespace sketch
