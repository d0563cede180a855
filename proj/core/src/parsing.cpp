#include "sketch/parsing.hpp"

#include <algorithm>
#include <cmath>

#include "sketch/layers.hpp"

namespace sketch {

ParsingMap::ParsingMap(Tensor p) : probs(std::move(p)) {
  if (probs.channels() != 3) {
    throw ShapeError("ParsingMap needs 3 channels, got " + probs.shape().str());
  }
}

bool ParsingMap::is_simplex(double tol) const {
  const std::size_t plane = probs.shape().plane();
  for (std::size_t i = 0; i < plane; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = probs[c * plane + i];
      if (!(v >= -tol && v <= 1.0 + tol)) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

Region ParsingMap::argmax(std::size_t y, std::size_t x) const {
  const double f = face(y, x);
  const double h = hair(y, x);
  const double b = background(y, x);
  if (f >= h && f >= b) return Region::face;
  if (h >= b) return Region::hair;
  return Region::background;
}

ParsingMap ParsingMap::from_labels(const LabelMap& labels) {
  Tensor t(3, labels.height, labels.width);
  const std::size_t plane = labels.height * labels.width;
  for (std::size_t i = 0; i < plane; ++i) {
    const std::uint8_t l = labels.labels[i];
    if (l < 1 || l > 3) throw std::invalid_argument("label outside {1,2,3}");
    t[(l - 1) * plane + i] = 1.0;
  }
  return ParsingMap(std::move(t));
}

ParsingMap ParsingMap::uniform(std::size_t h, std::size_t w) {
  return ParsingMap(Tensor(3, h, w, 1.0 / 3.0));
}

ParsingMap resize_parsing(const ParsingMap& map, std::size_t h, std::size_t w) {
  Tensor t = bilinear_resize(map.probs, h, w);
  const std::size_t plane = h * w;
  for (std::size_t i = 0; i < plane; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      double& v = t[c * plane + i];
      v = std::clamp(v, 0.0, 1.0);
      sum += v;
    }
    for (std::size_t c = 0; c < 3; ++c) {
      t[c * plane + i] = sum > 0.0 ? t[c * plane + i] / sum : 1.0 / 3.0;
    }
  }
  return ParsingMap(std::move(t));
}

LabelMap resize_labels(const LabelMap& labels, std::size_t h, std::size_t w) {
  LabelMap out(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t sy = std::min(labels.height - 1, (2 * y + 1) * labels.height / (2 * h));
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t sx = std::min(labels.width - 1, (2 * x + 1) * labels.width / (2 * w));
      out.at(y, x) = labels.at(sy, sx);
    }
  }
  return out;
}

}  // namespace sketch
