#pragma once

#include <cstddef>

#include "sketch/losses.hpp"
#include "sketch/tensor.hpp"

namespace sketch {

/// Per-pixel probabilities over (face, hair, background), stored as the three
/// channels of one tensor in that order.
struct ParsingMap {
  Tensor probs;

  ParsingMap() = default;
  explicit ParsingMap(Tensor p);

  std::size_t height() const { return probs.height(); }
  std::size_t width() const { return probs.width(); }
  double face(std::size_t y, std::size_t x) const { return probs.at(0, y, x); }
  double hair(std::size_t y, std::size_t x) const { return probs.at(1, y, x); }
  double background(std::size_t y, std::size_t x) const { return probs.at(2, y, x); }

  /// Every value in [0, 1] and every pixel summing to 1 within `tol`.
  bool is_simplex(double tol = 1e-6) const;
  /// Most probable class; ties resolve in face, hair, background order.
  Region argmax(std::size_t y, std::size_t x) const;

  static ParsingMap from_labels(const LabelMap& labels);
  static ParsingMap uniform(std::size_t h, std::size_t w);
};

/// Bilinear resize followed by per-pixel renormalisation onto the simplex.
ParsingMap resize_parsing(const ParsingMap& map, std::size_t h, std::size_t w);

/// Nearest-neighbour resize of a label map.
LabelMap resize_labels(const LabelMap& labels, std::size_t h, std::size_t w);

}  // namespace sketch
