#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "sketch/trainer.hpp"
#include "support/fixtures.hpp"

namespace sketch {
namespace {

using testing::random_tensor;

NetworkSpec small_bfcn() {
  BfcnWidths w;
  w.trunk = {4, 4, 4};
  w.branch = {4, 3};
  return bfcn_spec(2, w);
}

NetworkSpec small_pnet() {
  PnetWidths w;
  w.hidden = {4, 4, 4, 4, 4, 4, 4};
  return pnet_spec(4, w);
}

// Face and hair pairs cut from one random 32 x 32 frame.
std::vector<PatchPair> toy_pairs(std::mt19937_64& rng) {
  const Tensor photo = random_tensor({1, 32, 32}, rng, 0, 1);
  Tensor sketch(photo.shape());
  for (std::size_t i = 0; i < photo.size(); ++i) sketch[i] = 1.0 - 0.8 * photo[i];
  std::vector<PatchPair> pairs;
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t y = 8 * (k / 2), x = 8 * (k % 2);
    pairs.push_back({photo.crop(y, x, 16, 16), sketch.crop(y, x, 16, 16),
                     k % 2 == 0 ? Region::face : Region::hair, 1.0, y, x, 0});
  }
  return pairs;
}

TrainConfig quick_config() {
  TrainConfig c;
  c.epochs_bfcn = 3;
  c.epochs_pnet = 3;
  c.batch_size = 2;
  c.patch_size = 16;
  c.lr_bfcn = 0.01;
  c.lr_pnet = 0.01;
  c.init_std = 0.1;
  c.threads = 1;
  return c;
}

bool layers_equal(const NetworkWeights& a, const NetworkWeights& b, std::size_t first,
                  std::size_t count) {
  for (std::size_t i = first; i < first + count; ++i)
    if (!(a.layers[i] == b.layers[i])) return false;
  return true;
}

TEST(Sgd, PlainStep) {
  const NetworkSpec spec = small_bfcn();
  NetworkWeights w = zero_weights(spec), g = zero_weights(spec);
  w.layers[0].kernel[0] = 1.0;
  g.layers[0].kernel[0] = 0.5;
  g.layers[2].bias[1] = -2.0;
  sgd_step(w, g, 0.1);
  EXPECT_DOUBLE_EQ(w.layers[0].kernel[0], 0.95);
  EXPECT_DOUBLE_EQ(w.layers[2].bias[1], 0.2);
  EXPECT_EQ(w.layers[1].kernel[3], 0.0);
  EXPECT_THROW(sgd_step(w, zero_weights(small_pnet()), 0.1), ShapeError);
}

TEST(Sgd, MomentumAccumulates) {
  const NetworkSpec spec = small_bfcn();
  NetworkWeights w = zero_weights(spec), g = zero_weights(spec);
  g.layers[0].bias[0] = 1.0;
  SgdOptimizer opt(0.1, 0.5);
  opt.step(w, g);
  EXPECT_DOUBLE_EQ(w.layers[0].bias[0], -0.1);
  opt.step(w, g);
  EXPECT_DOUBLE_EQ(w.layers[0].bias[0], -0.1 - 0.1 * 1.5);
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(TrainConfig{}.validate());
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](TrainConfig& c) { c.alpha = -1; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](TrainConfig& c) { c.beta = -1; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](TrainConfig& c) { c.lr_bfcn = 0; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](TrainConfig& c) { c.momentum = 1.0; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](TrainConfig& c) { c.batch_size = 0; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](TrainConfig& c) { c.patch_size = 12; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](TrainConfig& c) { c.epochs_bfcn = 0; }).validate(), std::invalid_argument);
  EXPECT_THROW(bad([](TrainConfig& c) { c.init_std = 0; }).validate(), std::invalid_argument);
}

TEST(Config, DefaultRateIsReferenceRateRescaled) {
  EXPECT_NEAR(kDefaultBfcnRate, 1e-10 * 65025.0, 1e-20);
}

TEST(TrainBfcn, RequiresBothRegions) {
  std::mt19937_64 rng(1);
  auto pairs = toy_pairs(rng);
  const Tensor prior(1, 32, 32, 0.5);
  std::vector<PatchPair> face_only{pairs[0], pairs[2]};
  std::vector<PatchPair> hair_only{pairs[1], pairs[3]};
  EXPECT_THROW(train_bfcn(face_only, prior, small_bfcn(), quick_config()), std::invalid_argument);
  EXPECT_THROW(train_bfcn(hair_only, prior, small_bfcn(), quick_config()), std::invalid_argument);
  EXPECT_THROW(train_bfcn(pairs, Tensor(1, 20, 20), small_bfcn(), quick_config()), ShapeError);
}

TEST(TrainBfcn, DeterministicAcrossRunsAndThreadCounts) {
  std::mt19937_64 rng(2);
  const auto pairs = toy_pairs(rng);
  const Tensor prior(1, 32, 32, 0.5);
  TrainConfig c = quick_config();
  c.augment = true;
  const BfcnResult a = train_bfcn(pairs, prior, small_bfcn(), c);
  const BfcnResult b = train_bfcn(pairs, prior, small_bfcn(), c);
  c.threads = 3;
  const BfcnResult t = train_bfcn(pairs, prior, small_bfcn(), c);
  EXPECT_TRUE(a.weights.same_parameters(b.weights));
  EXPECT_TRUE(a.weights.same_parameters(t.weights));
  ASSERT_EQ(a.report.epochs.size(), 3u);
  for (std::size_t e = 0; e < 3; ++e) EXPECT_EQ(a.report.epochs[e].loss_g, t.report.epochs[e].loss_g);
  c.seed = 99;
  EXPECT_FALSE(a.weights.same_parameters(train_bfcn(pairs, prior, small_bfcn(), c).weights));
}

TEST(TrainBfcn, ZeroAlphaLeavesTexturalBranchUntouched) {
  std::mt19937_64 rng(3);
  const auto pairs = toy_pairs(rng);
  const NetworkSpec spec = small_bfcn();
  TrainConfig c = quick_config();
  c.alpha = 0.0;
  const NetworkWeights init = init_weights(spec, c.seed, c.init_std);
  const BfcnResult r = train_bfcn(pairs, Tensor(1, 32, 32, 0.5), spec, c);
  EXPECT_TRUE(layers_equal(r.weights, init, 6, 3));
  EXPECT_FALSE(layers_equal(r.weights, init, 0, 3));
  EXPECT_FALSE(layers_equal(r.weights, init, 3, 3));
}

TEST(TrainBfcn, ZeroStructuralWeightLeavesStructuralBranchUntouched) {
  std::mt19937_64 rng(4);
  const auto pairs = toy_pairs(rng);
  const NetworkSpec spec = small_bfcn();
  TrainConfig c = quick_config();
  c.structural_weight = 0.0;
  const NetworkWeights init = init_weights(spec, c.seed, c.init_std);
  const BfcnResult r = train_bfcn(pairs, Tensor(1, 32, 32, 0.5), spec, c);
  EXPECT_TRUE(layers_equal(r.weights, init, 3, 3));
  EXPECT_FALSE(layers_equal(r.weights, init, 0, 3));
  EXPECT_FALSE(layers_equal(r.weights, init, 6, 3));
}

TEST(TrainBfcn, ZeroBetaMakesTexturalLossPlainMse) {
  std::mt19937_64 rng(5);
  const auto pairs = toy_pairs(rng);
  TrainConfig c = quick_config();
  c.beta = 0.0;
  c.batch_size = 4;
  c.epochs_bfcn = 1;
  const NetworkSpec spec = small_bfcn();
  const NetworkWeights init = init_weights(spec, c.seed, c.init_std);
  const BfcnResult r = train_bfcn(pairs, Tensor(1, 32, 32, 0.5), spec, c);
  // One step over both hair pairs with the initial weights.
  double expected = 0.0;
  for (const std::size_t i : {1u, 3u}) {
    const Tensor in = bfcn_input(pairs[i].photo, Tensor(1, 16, 16, 0.5));
    const Tensor out = bfcn_forward(in, spec, init).textural;
    expected += mse(out, pairs[i].sketch.center_crop(4, 4)).value;
  }
  EXPECT_NEAR(r.report.epochs[0].loss_t, expected / 2.0, 1e-12);
}

TEST(TrainPnet, InitialLossIsLn3) {
  std::mt19937_64 rng(6);
  std::vector<ParsingSample> samples;
  for (int i = 0; i < 2; ++i) {
    LabelMap labels(6, 5);
    std::uniform_int_distribution<int> cls(1, 3);
    for (auto& l : labels.labels) l = static_cast<std::uint8_t>(cls(rng));
    samples.push_back({random_tensor({1, 12, 10}, rng, 0, 1), labels});
  }
  TrainConfig c = quick_config();
  c.epochs_pnet = 1;
  c.init_std = 0.01;
  c.lr_pnet = 1e-6;
  const PnetResult r = train_pnet(samples, ParsingMap::uniform(12, 10), small_pnet(), c);
  ASSERT_EQ(r.report.epochs.size(), 1u);
  EXPECT_NEAR(r.report.epochs[0].loss_p, std::log(3.0), 0.01);

  const double acc = pnet_pixel_accuracy(samples, ParsingMap::uniform(12, 10), small_pnet(), r.weights);
  EXPECT_GE(acc, 0.0);
  EXPECT_LE(acc, 1.0);
  EXPECT_THROW(train_pnet({}, ParsingMap::uniform(12, 10), small_pnet(), c), std::invalid_argument);
  std::vector<ParsingSample> wrong{{Tensor(1, 12, 10), LabelMap(12, 10)}};
  EXPECT_THROW(train_pnet(wrong, ParsingMap::uniform(12, 10), small_pnet(), c), ShapeError);
}

TEST(Report, CsvLayout) {
  const auto dir = testing::scratch_dir("report");
  TrainReport r;
  r.epochs.push_back({1, 0.5, 0.25, 3.0, 0.0, 12.5});
  r.write_csv(dir / "a.csv");
  r.write_csv(dir / "b.csv", true);
  const auto a = testing::file_bytes(dir / "a.csv");
  const auto b = testing::file_bytes(dir / "b.csv");
  EXPECT_EQ(std::string(a.begin(), a.end()),
            "epoch,loss_s,loss_t,loss_g,loss_p,seconds\n1,0.5,0.25,3,0,0.000000\n");
  EXPECT_EQ(std::string(b.begin(), b.end()),
            "epoch,loss_s,loss_t,loss_g,loss_p,seconds\n1,0.5,0.25,3,0,12.500000\n");
}

}  // namespace
}  // namespace sketch
