#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "sketch/losses.hpp"
#include "sketch/tensor.hpp"

namespace sketch::testing {

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(shape);
  for (double& v : t.data()) v = dist(rng);
  return t;
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("sketch_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<char> file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Aligned photo / sketch / label triple of a cartoon head: light background,
/// an elliptic face with smooth shading and a hair cap with random texture.
struct Portrait {
  Tensor photo;
  Tensor sketch;
  LabelMap labels;
};

inline Portrait synthetic_portrait(std::size_t h, std::size_t w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Portrait p{Tensor(1, h, w), Tensor(1, h, w), LabelMap(h, w)};
  const double cy = 0.56 * h, cx = 0.5 * w;
  const double phase = u(rng) * 3.0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double fy = (y - cy) / (0.32 * h), fx = (x - cx) / (0.3 * w);
      const double hy = (y - 0.4 * h) / (0.32 * h), hx = (x - cx) / (0.375 * w);
      Region r = Region::background;
      if (fy * fy + fx * fx < 1.0) {
        r = Region::face;
      } else if (hy * hy + hx * hx < 1.0 && y < 0.6 * h) {
        r = Region::hair;
      }
      p.labels.at(y, x) = static_cast<std::uint8_t>(r);
      double v = 0.86;
      if (r == Region::face) v = 0.6 + 0.15 * std::sin(x / 7.0 + phase) * std::cos(y / 9.0);
      if (r == Region::hair) v = 0.15 + 0.12 * u(rng);
      p.photo.at(0, y, x) = v;
    }
  }
  // Sketch: white paper darkened where the photo is dark or has strong gradients.
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double c = p.photo.at(0, y, x);
      const double gx = p.photo.at(0, y, std::min(x + 1, w - 1)) - p.photo.at(0, y, x > 0 ? x - 1 : 0);
      const double gy = p.photo.at(0, std::min(y + 1, h - 1), x) - p.photo.at(0, y > 0 ? y - 1 : 0, x);
      p.sketch.at(0, y, x) = std::clamp(1.0 - 0.3 * (1.0 - c) - 2.0 * std::hypot(gx, gy), 0.0, 1.0);
    }
  }
  return p;
}

}  // namespace sketch::testing
