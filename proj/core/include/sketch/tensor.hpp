#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketch {

/// Raised when operand shapes disagree. The message names both shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Shape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return channels * height * width; }
  std::size_t plane() const { return height * width; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Dense channels x height x width array stored row-major in (c, y, x) order.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0)
      : Tensor(Shape{channels, height, width}, fill) {}
  Tensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }
  /// Pointer to element (c, y, x); rows are contiguous in x.
  double* ptr(std::size_t c, std::size_t y, std::size_t x) {
    return data_.data() + (c * shape_.height + y) * shape_.width + x;
  }
  const double* ptr(std::size_t c, std::size_t y, std::size_t x) const {
    return data_.data() + (c * shape_.height + y) * shape_.width + x;
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> channel(std::size_t c) {
    return std::span<double>(data_).subspan(c * shape_.plane(), shape_.plane());
  }
  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(data_).subspan(c * shape_.plane(), shape_.plane());
  }
  const std::vector<double>& values() const { return data_; }

  /// Copy of channel range [first, first + count).
  Tensor channels_slice(std::size_t first, std::size_t count) const;
  /// Copy of the window [y0, y0 + h) x [x0, x0 + w) across all channels.
  Tensor crop(std::size_t y0, std::size_t x0, std::size_t h, std::size_t w) const;
  /// Central h x w window.
  Tensor center_crop(std::size_t h, std::size_t w) const;

  bool all_finite() const;
  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Stacks tensors of equal spatial size along the channel axis.
Tensor concat_channels(std::span<const Tensor> parts);

void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace sketch
