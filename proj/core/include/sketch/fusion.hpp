#pragma once

#include "sketch/parsing.hpp"
#include "sketch/tensor.hpp"

namespace sketch {

/// Structural and textural sketches (1 x H x W) with a parsing map of the same size.
struct FusionInput {
  Tensor structural;
  Tensor textural;
  ParsingMap parsing;
};

/// 1 where hair probability is at least the face and background probabilities.
Tensor binary_hair_map(const ParsingMap& parsing);

/// Per-pixel selection: textural where the hair mask is set, structural elsewhere.
Tensor hard_fuse(const FusionInput& input);

/// (1 - P_hair) * structural + P_hair * textural.
Tensor soft_fuse(const FusionInput& input);

/// Clamps every value into [0, 1].
Tensor clamp_unit(Tensor image);

}  // namespace sketch
