#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sketch/gradcheck.hpp"
#include "sketch/losses.hpp"
#include "support/fixtures.hpp"

namespace sketch {
namespace {

using testing::random_tensor;

Tensor permuted(const Tensor& t, std::mt19937_64& rng) {
  std::vector<double> v = t.values();
  std::shuffle(v.begin(), v.end(), rng);
  return Tensor(t.shape(), std::move(v));
}

double sort_then_mse(const Tensor& a, const Tensor& b) {
  std::vector<double> x = a.values(), y = b.values();
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

TEST(SortPermutation, StableAscending) {
  const std::vector<double> v{3.0, 1.0, 2.0, 1.0};
  EXPECT_EQ(sort_permutation(v), (std::vector<std::size_t>{1, 3, 2, 0}));
}

TEST(Mse, Basics) {
  std::mt19937_64 rng(1);
  const Tensor x = random_tensor({1, 4, 4}, rng);
  EXPECT_EQ(mse(x, x).value, 0.0);
  const LossValue l = mse(Tensor(1, 1, 1, 0.0), Tensor(1, 1, 1, 2.0));
  EXPECT_EQ(l.value, 4.0);
  EXPECT_EQ(l.grad[0], -4.0);
  EXPECT_THROW(mse(Tensor(1, 2, 2), Tensor(1, 2, 3)), ShapeError);
}

TEST(Mse, MatchesLoopOracle) {
  std::mt19937_64 rng(2);
  const Tensor a = random_tensor({2, 3, 5}, rng), b = random_tensor({2, 3, 5}, rng);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  const LossValue l = mse(a, b);
  EXPECT_NEAR(l.value, s / 30.0, 1e-12);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(l.grad[i], 2.0 * (a[i] - b[i]) / 30.0, 1e-15);
}

TEST(SmMse, PermutationOfTargetIsZero) {
  std::mt19937_64 rng(3);
  const Tensor x = random_tensor({1, 6, 6}, rng);
  EXPECT_EQ(sm_mse(permuted(x, rng), x).value, 0.0);
}

TEST(SmMse, AscendingInputsEqualMse) {
  std::mt19937_64 rng(4);
  std::vector<double> a = random_tensor({1, 1, 20}, rng).values();
  std::vector<double> b = random_tensor({1, 1, 20}, rng).values();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const Tensor ta({1, 1, 20}, a), tb({1, 1, 20}, b);
  EXPECT_EQ(sm_mse(ta, tb).value, mse(ta, tb).value);
}

TEST(SmMse, MatchesSortOracleAndFiniteDifferences) {
  std::mt19937_64 rng(5);
  const Tensor a = random_tensor({1, 5, 5}, rng), b = random_tensor({1, 5, 5}, rng);
  EXPECT_NEAR(sm_mse(a, b).value, sort_then_mse(a, b), 1e-12);
  EXPECT_LT(run_gradcheck_target("smmse", 5).max_rel_error, 1e-4);
}

TEST(SmMse, GradientRoutesThroughPredictionOrder) {
  // pred ranks: 0.9 -> rank 2, 0.1 -> rank 0, 0.5 -> rank 1.
  const Tensor pred({1, 1, 3}, std::vector<double>{0.9, 0.1, 0.5});
  const Tensor target({1, 1, 3}, std::vector<double>{0.0, 1.0, 0.3});
  const LossValue l = sm_mse(pred, target);
  // Sorted target 0.0, 0.3, 1.0 pairs with 0.1, 0.5, 0.9.
  EXPECT_NEAR(l.grad[1], 2.0 * (0.1 - 0.0) / 3.0, 1e-15);
  EXPECT_NEAR(l.grad[2], 2.0 * (0.5 - 0.3) / 3.0, 1e-15);
  EXPECT_NEAR(l.grad[0], 2.0 * (0.9 - 1.0) / 3.0, 1e-15);
}

TEST(SmMse, TargetPermutationInvariance) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor p = random_tensor({1, 4, 4}, rng), t = random_tensor({1, 4, 4}, rng);
    EXPECT_EQ(sm_mse(p, t).value, sm_mse(p, permuted(t, rng)).value);
  }
}

TEST(SmMse, NeverExceedsMse) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const Tensor p = random_tensor({1, 4, 4}, rng), t = random_tensor({1, 4, 4}, rng);
    ASSERT_LE(sm_mse(p, t).value, mse(p, t).value + 1e-15);
  }
}

TEST(SmMse, ShiftedChessboard) {
  Tensor board(1, 8, 8), shifted(1, 8, 8);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < 8; ++x) {
      board.at(0, y, x) = (x + y) % 2 == 0 ? 1.0 : 0.0;
      shifted.at(0, y, x) = (x + y + 1) % 2 == 0 ? 1.0 : 0.0;
    }
  EXPECT_EQ(mse(board, shifted).value, 1.0);
  EXPECT_EQ(sm_mse(board, shifted).value, 0.0);
}

TEST(TexturalLoss, Composition) {
  std::mt19937_64 rng(8);
  const Tensor a = random_tensor({1, 4, 4}, rng), b = random_tensor({1, 4, 4}, rng);
  EXPECT_EQ(textural_loss(a, b, 0.0).value, mse(a, b).value);
  EXPECT_EQ(textural_loss(a, a, 10.0).value, 0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  EXPECT_NEAR(textural_loss(a, b, 10.0).value, s / 16.0 + 10.0 * sort_then_mse(a, b), 1e-12);
  EXPECT_THROW(textural_loss(a, b, -1.0), std::invalid_argument);
}

TEST(SoftmaxLoss, UniformLogitsGiveLn3) {
  LabelMap labels(3, 4, Region::hair);
  labels.at(0, 0) = 1;
  EXPECT_NEAR(softmax_parsing_loss(Tensor(3, 3, 4), labels).value, std::log(3.0), 1e-12);
}

TEST(SoftmaxLoss, SaturatedMargin) {
  LabelMap labels(2, 2, Region::background);
  labels.at(1, 0) = static_cast<std::uint8_t>(Region::face);
  Tensor logits(3, 2, 2);
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t x = 0; x < 2; ++x) logits.at(labels.at(y, x) - 1, y, x) = 50.0;
  EXPECT_LT(softmax_parsing_loss(logits, labels).value, 1e-8);
}

TEST(SoftmaxLoss, GradientAndErrors) {
  EXPECT_LT(run_gradcheck_target("softmax", 9).max_rel_error, 1e-4);
  LabelMap bad(1, 1);
  bad.labels[0] = 4;
  EXPECT_THROW(softmax_parsing_loss(Tensor(3, 1, 1), bad), std::invalid_argument);
  EXPECT_THROW(softmax_parsing_loss(Tensor(2, 1, 1), LabelMap(1, 1)), ShapeError);
}

TEST(SoftmaxLoss, GradIsSoftmaxMinusOneHotOverPixels) {
  std::mt19937_64 rng(10);
  const Tensor logits = random_tensor({3, 2, 3}, rng);
  LabelMap labels(2, 3, Region::face);
  labels.at(1, 2) = 3;
  const Tensor p = softmax_channels(logits);
  const LossValue l = softmax_parsing_loss(logits, labels);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t x = 0; x < 3; ++x) {
        const double onehot = labels.at(y, x) == c + 1 ? 1.0 : 0.0;
        EXPECT_NEAR(l.grad.at(c, y, x), (p.at(c, y, x) - onehot) / 6.0, 1e-15);
      }
}

TEST(CombinedLoss, Weights) {
  const LossValue s{2.0, Tensor(1, 1, 1, 1.0)};
  const LossValue t{3.0, Tensor(1, 1, 1, 1.0)};
  EXPECT_EQ(combined_bfcn_loss(s, t, 0.0).value, 2.0);
  EXPECT_EQ(combined_bfcn_loss(s, t, 0.0).textural_grad[0], 0.0);
  EXPECT_EQ(combined_bfcn_loss(s, t, 1.0).value, 5.0);
  const LossValue z{0.0, Tensor(1, 1, 1)};
  EXPECT_EQ(combined_bfcn_loss(z, z, 1.0).value, 0.0);
  EXPECT_THROW(combined_bfcn_loss(s, t, -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace sketch
