#include "sketch/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <cblas.h>

namespace sketch {

ConvParams::ConvParams(std::size_t out, std::size_t in, std::size_t kh_, std::size_t kw_)
    : out_channels(out),
      in_channels(in),
      kh(kh_),
      kw(kw_),
      kernel(out * in * kh_ * kw_, 0.0),
      bias(out, 0.0) {}

bool ConvParams::consistent() const {
  return out_channels > 0 && in_channels > 0 && kh % 2 == 1 && kw % 2 == 1 &&
         kernel.size() == out_channels * in_channels * kh * kw && bias.size() == out_channels;
}

namespace {

std::string params_str(const ConvParams& p) {
  return std::to_string(p.out_channels) + "x" + std::to_string(p.in_channels) + "x" +
         std::to_string(p.kh) + "x" + std::to_string(p.kw);
}

Tensor zero_pad(const Tensor& input, std::size_t pad) {
  Tensor out(input.channels(), input.height() + 2 * pad, input.width() + 2 * pad);
  for (std::size_t c = 0; c < input.channels(); ++c) {
    for (std::size_t y = 0; y < input.height(); ++y) {
      const double* src = input.ptr(c, y, 0);
      std::copy(src, src + input.width(), out.ptr(c, y + pad, pad));
    }
  }
  return out;
}

void check_conv(const Tensor& input, const ConvParams& p) {
  if (!p.consistent()) {
    throw ShapeError("conv2d: inconsistent kernel " + params_str(p) + " with bias length " +
                     std::to_string(p.bias.size()));
  }
  if (input.channels() != p.in_channels || input.height() < p.kh || input.width() < p.kw) {
    throw ShapeError("conv2d: input " + input.shape().str() + " incompatible with kernel " +
                     params_str(p));
  }
}

// Column matrix: row (i, ky, kx) holds the input values that kernel tap
// meets at every output position, so convolution becomes a matrix product.
// The column buffers are reused per thread; reallocating them for every call
// costs more than the products for the patch sizes used in training.
std::vector<double>& scratch(int slot, std::size_t size) {
  thread_local std::vector<double> buffers[2];
  auto& b = buffers[slot];
  if (b.size() < size) b.resize(size);
  return b;
}

const std::vector<double>& im2col(const Tensor& in, std::size_t kh, std::size_t kw,
                                  std::size_t oh, std::size_t ow) {
  const std::size_t positions = oh * ow;
  std::vector<double>& col = scratch(0, in.channels() * kh * kw * positions);
  double* dst = col.data();
  for (std::size_t i = 0; i < in.channels(); ++i)
    for (std::size_t ky = 0; ky < kh; ++ky)
      for (std::size_t kx = 0; kx < kw; ++kx)
        for (std::size_t y = 0; y < oh; ++y, dst += ow) {
          const double* src = in.ptr(i, y + ky, kx);
          std::copy(src, src + ow, dst);
        }
  return col;
}

Tensor conv_valid(const Tensor& in, const ConvParams& p) {
  check_conv(in, p);
  const std::size_t oh = in.height() - p.kh + 1;
  const std::size_t ow = in.width() - p.kw + 1;
  const auto positions = static_cast<blasint>(oh * ow);
  const auto taps = static_cast<blasint>(p.in_channels * p.kh * p.kw);
  const auto outs = static_cast<blasint>(p.out_channels);
  const std::vector<double>& col = im2col(in, p.kh, p.kw, oh, ow);
  Tensor out(p.out_channels, oh, ow);
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    auto plane = out.channel(o);
    std::fill(plane.begin(), plane.end(), p.bias[o]);
  }
  // out (O x P) += W (O x T) * col (T x P)
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, outs, positions, taps, 1.0,
              p.kernel.data(), taps, col.data(), positions, 1.0, out.data().data(), positions);
  return out;
}

ConvGrads conv_valid_backward(const Tensor& in, const ConvParams& p, const Tensor& g) {
  check_conv(in, p);
  const std::size_t oh = in.height() - p.kh + 1;
  const std::size_t ow = in.width() - p.kw + 1;
  if (g.channels() != p.out_channels || g.height() != oh || g.width() != ow) {
    throw ShapeError("conv2d_backward: gradient " + g.shape().str() + " vs expected output " +
                     Shape{p.out_channels, oh, ow}.str());
  }
  const auto positions = static_cast<blasint>(oh * ow);
  const auto taps = static_cast<blasint>(p.in_channels * p.kh * p.kw);
  const auto outs = static_cast<blasint>(p.out_channels);
  const std::vector<double>& col = im2col(in, p.kh, p.kw, oh, ow);
  std::vector<double>& grad_col = scratch(1, static_cast<std::size_t>(taps * positions));
  ConvGrads grads{Tensor(in.shape()), ConvParams(p.out_channels, p.in_channels, p.kh, p.kw)};
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    double sum = 0.0;
    for (double v : g.channel(o)) sum += v;
    grads.params.bias[o] = sum;
  }
  // dW (O x T) = g (O x P) * col^T;  dcol (T x P) = W^T * g
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, outs, taps, positions, 1.0,
              g.data().data(), positions, col.data(), positions, 0.0,
              grads.params.kernel.data(), taps);
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, taps, positions, outs, 1.0,
              p.kernel.data(), taps, g.data().data(), positions, 0.0, grad_col.data(),
              positions);
  const double* src = grad_col.data();
  for (std::size_t i = 0; i < p.in_channels; ++i)
    for (std::size_t ky = 0; ky < p.kh; ++ky)
      for (std::size_t kx = 0; kx < p.kw; ++kx)
        for (std::size_t y = 0; y < oh; ++y, src += ow) {
          double* __restrict gi = grads.input.ptr(i, y + ky, kx);
          for (std::size_t x = 0; x < ow; ++x) gi[x] += src[x];
        }
  return grads;
}

void require_finite(const Tensor& t, const char* op) {
  if (!t.all_finite()) throw std::domain_error(std::string(op) + ": non-finite value produced");
}

}  // namespace

Tensor conv2d(const Tensor& input, const ConvParams& params, std::size_t pad) {
  Tensor out = pad == 0 ? conv_valid(input, params) : conv_valid(zero_pad(input, pad), params);
  require_finite(out, "conv2d");
  return out;
}

ConvGrads conv2d_backward(const Tensor& input, const ConvParams& params, const Tensor& grad_out,
                          std::size_t pad) {
  if (pad == 0) return conv_valid_backward(input, params, grad_out);
  ConvGrads g = conv_valid_backward(zero_pad(input, pad), params, grad_out);
  g.input = g.input.crop(pad, pad, input.height(), input.width());
  return g;
}

Tensor relu(const Tensor& input) {
  Tensor out(input.shape());
  auto src = input.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0.0 ? src[i] : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_out) {
  require_same_shape(input, grad_out, "relu_backward");
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > 0.0 ? grad_out[i] : 0.0;
  return out;
}

namespace {

void check_even(const Tensor& input) {
  if (input.height() % 2 != 0 || input.width() % 2 != 0) {
    throw ShapeError("maxpool2x2: spatial dims must be even, got " + input.shape().str());
  }
}

// Flat index of the row-major-first maximum inside the 2x2 window at (y, x),
// clipped to the tensor bounds.
std::size_t argmax_window(const Tensor& in, std::size_t c, std::size_t y, std::size_t x) {
  const std::size_t y1 = std::min(y + 2, in.height());
  const std::size_t x1 = std::min(x + 2, in.width());
  std::size_t best = (c * in.height() + y) * in.width() + x;
  for (std::size_t yy = y; yy < y1; ++yy) {
    for (std::size_t xx = x; xx < x1; ++xx) {
      const std::size_t idx = (c * in.height() + yy) * in.width() + xx;
      if (in[idx] > in[best]) best = idx;
    }
  }
  return best;
}

}  // namespace

Tensor maxpool2x2(const Tensor& input) {
  check_even(input);
  Tensor out(input.channels(), input.height() / 2, input.width() / 2);
  for (std::size_t c = 0; c < out.channels(); ++c)
    for (std::size_t y = 0; y < out.height(); ++y)
      for (std::size_t x = 0; x < out.width(); ++x)
        out.at(c, y, x) = input[argmax_window(input, c, 2 * y, 2 * x)];
  return out;
}

Tensor maxpool2x2_backward(const Tensor& input, const Tensor& grad_out) {
  check_even(input);
  if (grad_out.shape() != Shape{input.channels(), input.height() / 2, input.width() / 2}) {
    throw ShapeError("maxpool2x2_backward: gradient " + grad_out.shape().str() + " for input " +
                     input.shape().str());
  }
  Tensor grad(input.shape());
  for (std::size_t c = 0; c < grad_out.channels(); ++c)
    for (std::size_t y = 0; y < grad_out.height(); ++y)
      for (std::size_t x = 0; x < grad_out.width(); ++x)
        grad[argmax_window(input, c, 2 * y, 2 * x)] += grad_out.at(c, y, x);
  return grad;
}

Tensor maxpool2x2_same(const Tensor& input) {
  Tensor out(input.shape());
  for (std::size_t c = 0; c < out.channels(); ++c)
    for (std::size_t y = 0; y < out.height(); ++y)
      for (std::size_t x = 0; x < out.width(); ++x)
        out.at(c, y, x) = input[argmax_window(input, c, y, x)];
  return out;
}

Tensor maxpool2x2_same_backward(const Tensor& input, const Tensor& grad_out) {
  require_same_shape(input, grad_out, "maxpool2x2_same_backward");
  Tensor grad(input.shape());
  for (std::size_t c = 0; c < input.channels(); ++c)
    for (std::size_t y = 0; y < input.height(); ++y)
      for (std::size_t x = 0; x < input.width(); ++x)
        grad[argmax_window(input, c, y, x)] += grad_out.at(c, y, x);
  return grad;
}

namespace {

void check_lrn(const LrnParams& p) {
  if (p.n % 2 == 0) throw std::invalid_argument("lrn: window size n must be odd");
  if (!(p.k > 0.0)) throw std::invalid_argument("lrn: k must be positive");
}

// scale(c, i) = k + alpha * sum over the channel window of x^2.
Tensor lrn_scale(const Tensor& in, const LrnParams& p) {
  const std::size_t half = p.n / 2;
  const std::size_t channels = in.channels();
  const std::size_t plane = in.shape().plane();
  Tensor scale(in.shape(), p.k);
  for (std::size_t c = 0; c < channels; ++c) {
    const std::size_t lo = c >= half ? c - half : 0;
    const std::size_t hi = std::min(channels - 1, c + half);
    auto dst = scale.channel(c);
    for (std::size_t j = lo; j <= hi; ++j) {
      auto src = in.channel(j);
      for (std::size_t i = 0; i < plane; ++i) dst[i] += p.alpha * src[i] * src[i];
    }
  }
  return scale;
}

}  // namespace

Tensor lrn(const Tensor& input, const LrnParams& params) {
  check_lrn(params);
  const Tensor scale = lrn_scale(input, params);
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i)
    out[i] = input[i] * std::pow(scale[i], -params.beta);
  require_finite(out, "lrn");
  return out;
}

Tensor lrn_backward(const Tensor& input, const Tensor& grad_out, const LrnParams& params) {
  check_lrn(params);
  require_same_shape(input, grad_out, "lrn_backward");
  const Tensor scale = lrn_scale(input, params);
  const std::size_t half = params.n / 2;
  const std::size_t channels = input.channels();
  const std::size_t plane = input.shape().plane();

  // ratio(c) = g_c * x_c * scale_c^(-beta - 1)
  Tensor ratio(input.shape());
  Tensor grad(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) {
    grad[i] = grad_out[i] * std::pow(scale[i], -params.beta);
    ratio[i] = grad_out[i] * input[i] * std::pow(scale[i], -params.beta - 1.0);
  }
  const double coeff = -2.0 * params.alpha * params.beta;
  for (std::size_t j = 0; j < channels; ++j) {
    // Channel j contributes to the normalizer of every c within half of it.
    const std::size_t lo = j >= half ? j - half : 0;
    const std::size_t hi = std::min(channels - 1, j + half);
    auto dst = grad.channel(j);
    auto xj = input.channel(j);
    for (std::size_t c = lo; c <= hi; ++c) {
      auto r = ratio.channel(c);
      for (std::size_t i = 0; i < plane; ++i) dst[i] += coeff * xj[i] * r[i];
    }
  }
  return grad;
}

Tensor bilinear_resize(const Tensor& input, std::size_t out_h, std::size_t out_w) {
  if (out_h == 0 || out_w == 0) throw ShapeError("bilinear_resize: target size must be positive");
  if (out_h == input.height() && out_w == input.width()) return input;
  const std::size_t ih = input.height();
  const std::size_t iw = input.width();
  auto coord = [](std::size_t dst, std::size_t n_in, std::size_t n_out) {
    if (n_out == 1 || n_in == 1) return 0.0;
    return static_cast<double>(dst) * static_cast<double>(n_in - 1) /
           static_cast<double>(n_out - 1);
  };
  Tensor out(input.channels(), out_h, out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    const double sy = coord(y, ih, out_h);
    const std::size_t y0 = std::min(static_cast<std::size_t>(sy), ih - 1);
    const std::size_t y1 = std::min(y0 + 1, ih - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < out_w; ++x) {
      const double sx = coord(x, iw, out_w);
      const std::size_t x0 = std::min(static_cast<std::size_t>(sx), iw - 1);
      const std::size_t x1 = std::min(x0 + 1, iw - 1);
      const double fx = sx - static_cast<double>(x0);
      for (std::size_t c = 0; c < input.channels(); ++c) {
        const double top = input.at(c, y0, x0) * (1.0 - fx) + input.at(c, y0, x1) * fx;
        const double bottom = input.at(c, y1, x0) * (1.0 - fx) + input.at(c, y1, x1) * fx;
        out.at(c, y, x) = top * (1.0 - fy) + bottom * fy;
      }
    }
  }
  return out;
}

}  // namespace sketch
