#pragma once

#include <cstddef>
#include <vector>

#include "sketch/tensor.hpp"

namespace sketch {

/// Kernel (out x in x kh x kw, row-major) and bias (out) of one convolution.
struct ConvParams {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t kh = 0;
  std::size_t kw = 0;
  std::vector<double> kernel;
  std::vector<double> bias;

  ConvParams() = default;
  ConvParams(std::size_t out, std::size_t in, std::size_t kh, std::size_t kw);

  double& k(std::size_t o, std::size_t i, std::size_t y, std::size_t x) {
    return kernel[((o * in_channels + i) * kh + y) * kw + x];
  }
  double k(std::size_t o, std::size_t i, std::size_t y, std::size_t x) const {
    return kernel[((o * in_channels + i) * kh + y) * kw + x];
  }
  std::size_t parameter_count() const { return kernel.size() + bias.size(); }
  bool consistent() const;
  bool operator==(const ConvParams&) const = default;
};

struct ConvGrads {
  Tensor input;
  ConvParams params;
};

/// Cross-correlation of `input` with `params`. `pad` zero-pads every border;
/// the sketch network always uses pad = 0 (valid convolution).
Tensor conv2d(const Tensor& input, const ConvParams& params, std::size_t pad = 0);
ConvGrads conv2d_backward(const Tensor& input, const ConvParams& params, const Tensor& grad_out,
                          std::size_t pad = 0);

Tensor relu(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_out);

/// Non-overlapping 2x2 max. Ties resolve to the first position in row-major order.
Tensor maxpool2x2(const Tensor& input);
Tensor maxpool2x2_backward(const Tensor& input, const Tensor& grad_out);

/// 2x2 window at stride 1; the window is clipped at the bottom and right
/// borders so the output keeps the input size.
Tensor maxpool2x2_same(const Tensor& input);
Tensor maxpool2x2_same_backward(const Tensor& input, const Tensor& grad_out);

struct LrnParams {
  double k = 2.0;
  std::size_t n = 5;
  double alpha = 1e-4;
  double beta = 0.75;
};

/// Cross-channel response normalization x / (k + alpha * sum x^2)^beta, the
/// sum running over n channels centred on the current one, clipped at the ends.
Tensor lrn(const Tensor& input, const LrnParams& params = {});
Tensor lrn_backward(const Tensor& input, const Tensor& grad_out, const LrnParams& params = {});

/// Corner-aligned bilinear interpolation of every channel.
Tensor bilinear_resize(const Tensor& input, std::size_t out_h, std::size_t out_w);

}  // namespace sketch
