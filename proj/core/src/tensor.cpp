#include "sketch/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace sketch {

std::string Shape::str() const {
  return std::to_string(channels) + "x" + std::to_string(height) + "x" + std::to_string(width);
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape), data_(shape.size(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_.str());
  }
}

Tensor Tensor::channels_slice(std::size_t first, std::size_t count) const {
  if (first + count > shape_.channels) {
    throw ShapeError("channel slice [" + std::to_string(first) + ", " +
                     std::to_string(first + count) + ") out of range for " + shape_.str());
  }
  Tensor out(Shape{count, shape_.height, shape_.width});
  auto src = data().subspan(first * shape_.plane(), count * shape_.plane());
  std::copy(src.begin(), src.end(), out.data_.begin());
  return out;
}

Tensor Tensor::crop(std::size_t y0, std::size_t x0, std::size_t h, std::size_t w) const {
  if (y0 + h > shape_.height || x0 + w > shape_.width) {
    throw ShapeError("crop window " + std::to_string(h) + "x" + std::to_string(w) + " at (" +
                     std::to_string(y0) + ", " + std::to_string(x0) + ") exceeds " +
                     shape_.str());
  }
  Tensor out(Shape{shape_.channels, h, w});
  for (std::size_t c = 0; c < shape_.channels; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      const double* src = &data_[(c * shape_.height + y0 + y) * shape_.width + x0];
      std::copy(src, src + w, out.ptr(c, y, 0));
    }
  }
  return out;
}

Tensor Tensor::center_crop(std::size_t h, std::size_t w) const {
  if (h > shape_.height || w > shape_.width) {
    throw ShapeError("center crop " + std::to_string(h) + "x" + std::to_string(w) +
                     " larger than " + shape_.str());
  }
  return crop((shape_.height - h) / 2, (shape_.width - w) / 2, h, w);
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor concat_channels(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_channels: no inputs");
  const std::size_t h = parts.front().height();
  const std::size_t w = parts.front().width();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.height() != h || p.width() != w) {
      throw ShapeError("concat_channels: " + p.shape().str() + " vs " +
                       parts.front().shape().str());
    }
    total += p.channels();
  }
  std::vector<double> data;
  data.reserve(total * h * w);
  for (const auto& p : parts) data.insert(data.end(), p.data().begin(), p.data().end());
  return Tensor(Shape{total, h, w}, std::move(data));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape().str() + " vs " +
                     b.shape().str());
  }
}

}  // namespace sketch
