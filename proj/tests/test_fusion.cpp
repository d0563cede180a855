#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sketch/fusion.hpp"
#include "support/fixtures.hpp"

namespace sketch {
namespace {

using testing::random_tensor;

ParsingMap single_pixel(double face, double hair, double bg) {
  return ParsingMap(Tensor({3, 1, 1}, std::vector<double>{face, hair, bg}));
}

ParsingMap random_parsing(std::size_t h, std::size_t w, std::mt19937_64& rng) {
  Tensor p = random_tensor({3, h, w}, rng, 0.01, 1.0);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const double s = p.at(0, y, x) + p.at(1, y, x) + p.at(2, y, x);
      for (std::size_t c = 0; c < 3; ++c) p.at(c, y, x) /= s;
    }
  return ParsingMap(std::move(p));
}

TEST(HairMap, Examples) {
  EXPECT_EQ(binary_hair_map(single_pixel(0.2, 0.7, 0.1))[0], 1.0);
  EXPECT_EQ(binary_hair_map(single_pixel(0.7, 0.2, 0.1))[0], 0.0);
  EXPECT_EQ(binary_hair_map(single_pixel(0.1, 0.2, 0.7))[0], 0.0);
  EXPECT_EQ(binary_hair_map(single_pixel(0.4, 0.4, 0.2))[0], 1.0);
  EXPECT_EQ(binary_hair_map(single_pixel(0.2, 0.4, 0.4))[0], 1.0);
  EXPECT_EQ(binary_hair_map(ParsingMap::uniform(1, 1))[0], 1.0);
}

TEST(Fuse, ExtremesSelectOneBranch) {
  const Tensor s(1, 1, 1, 0.2), t(1, 1, 1, 0.9);
  const FusionInput hair{s, t, single_pixel(0, 1, 0)};
  const FusionInput face{s, t, single_pixel(1, 0, 0)};
  EXPECT_EQ(hard_fuse(hair)[0], 0.9);
  EXPECT_EQ(soft_fuse(hair)[0], 0.9);
  EXPECT_EQ(hard_fuse(face)[0], 0.2);
  EXPECT_EQ(soft_fuse(face)[0], 0.2);
  const FusionInput half{s, t, single_pixel(0.25, 0.5, 0.25)};
  EXPECT_NEAR(soft_fuse(half)[0], 0.55, 1e-15);
  EXPECT_EQ(hard_fuse(half)[0], 0.9);
}

TEST(Fuse, SoftIsConvexAndHardPicksAnOperand) {
  std::mt19937_64 rng(1);
  const FusionInput in{random_tensor({1, 9, 8}, rng), random_tensor({1, 9, 8}, rng),
                       random_parsing(9, 8, rng)};
  const Tensor soft = soft_fuse(in), hard = hard_fuse(in);
  for (std::size_t i = 0; i < soft.size(); ++i) {
    const double lo = std::min(in.structural[i], in.textural[i]);
    const double hi = std::max(in.structural[i], in.textural[i]);
    EXPECT_GE(soft[i], lo - 1e-15);
    EXPECT_LE(soft[i], hi + 1e-15);
    EXPECT_TRUE(hard[i] == in.structural[i] || hard[i] == in.textural[i]);
  }
}

TEST(Fuse, AgreeWhenParsingIsOneHot) {
  std::mt19937_64 rng(2);
  LabelMap labels(6, 7);
  std::uniform_int_distribution<int> cls(1, 3);
  for (auto& l : labels.labels) l = static_cast<std::uint8_t>(cls(rng));
  const FusionInput in{random_tensor({1, 6, 7}, rng), random_tensor({1, 6, 7}, rng),
                       ParsingMap::from_labels(labels)};
  EXPECT_EQ(hard_fuse(in), soft_fuse(in));
}

TEST(Fuse, SoftBlendFollowsARampWithoutJumps) {
  // Hair probability rising smoothly left to right: the soft result has no
  // step larger than the ramp allows, while the hard result flips once.
  const std::size_t w = 50;
  Tensor p(3, 1, w);
  for (std::size_t x = 0; x < w; ++x) {
    const double h = static_cast<double>(x) / (w - 1);
    p.at(1, 0, x) = h;
    p.at(0, 0, x) = 1.0 - h;
  }
  const FusionInput in{Tensor(1, 1, w, 0.0), Tensor(1, 1, w, 1.0), ParsingMap(p)};
  const Tensor soft = soft_fuse(in), hard = hard_fuse(in);
  int flips = 0;
  for (std::size_t x = 1; x < w; ++x) {
    EXPECT_NEAR(soft[x] - soft[x - 1], 1.0 / (w - 1), 1e-12);
    if (hard[x] != hard[x - 1]) ++flips;
  }
  EXPECT_EQ(flips, 1);
}

TEST(Fuse, ShapeChecks) {
  const FusionInput bad{Tensor(1, 2, 2), Tensor(1, 2, 3), ParsingMap::uniform(2, 2)};
  EXPECT_THROW(hard_fuse(bad), ShapeError);
  EXPECT_THROW(soft_fuse(bad), ShapeError);
}

TEST(ClampUnit, Clamps) {
  const Tensor c = clamp_unit(Tensor({1, 1, 3}, std::vector<double>{-0.5, 0.5, 1.5}));
  EXPECT_EQ(c, Tensor({1, 1, 3}, std::vector<double>{0.0, 0.5, 1.0}));
}

}  // namespace
}  // namespace sketch
