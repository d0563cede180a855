#include "sketch/fusion.hpp"

#include <algorithm>

namespace sketch {

namespace {

void check_congruent(const FusionInput& in) {
  const Shape expect{1, in.parsing.height(), in.parsing.width()};
  if (in.structural.shape() != expect || in.textural.shape() != expect) {
    throw ShapeError("fusion: structural " + in.structural.shape().str() + ", textural " +
                     in.textural.shape().str() + " and parsing " +
                     in.parsing.probs.shape().str() + " are not congruent");
  }
}

Tensor blend(const FusionInput& in, const Tensor& weight) {
  Tensor out(in.structural.shape());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - weight[i]) * in.structural[i] + weight[i] * in.textural[i];
  return out;
}

}  // namespace

Tensor binary_hair_map(const ParsingMap& parsing) {
  Tensor mask(1, parsing.height(), parsing.width());
  for (std::size_t y = 0; y < parsing.height(); ++y) {
    for (std::size_t x = 0; x < parsing.width(); ++x) {
      const double h = parsing.hair(y, x);
      mask.at(0, y, x) = (h >= parsing.face(y, x) && h >= parsing.background(y, x)) ? 1.0 : 0.0;
    }
  }
  return mask;
}

Tensor hard_fuse(const FusionInput& input) {
  check_congruent(input);
  const Tensor mask = binary_hair_map(input.parsing);
  return blend(input, mask);
}

Tensor soft_fuse(const FusionInput& input) {
  check_congruent(input);
  return blend(input, input.parsing.probs.channels_slice(1, 1));
}

Tensor clamp_unit(Tensor image) {
  for (double& v : image.data()) v = std::clamp(v, 0.0, 1.0);
  return image;
}

}  // namespace sketch
