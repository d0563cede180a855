#include "sketch/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sketch {

std::vector<std::size_t> sort_permutation(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return idx;
}

LossValue mse(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mse");
  const double n = static_cast<double>(pred.size());
  LossValue out{0.0, Tensor(pred.shape())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    out.value += d * d;
    out.grad[i] = 2.0 * d / n;
  }
  out.value /= n;
  return out;
}

LossValue sm_mse(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "sm_mse");
  const double n = static_cast<double>(pred.size());
  const auto order = sort_permutation(pred.data());
  std::vector<double> sorted_target(target.data().begin(), target.data().end());
  std::sort(sorted_target.begin(), sorted_target.end());

  LossValue out{0.0, Tensor(pred.shape())};
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double d = pred[order[r]] - sorted_target[r];
    out.value += d * d;
    out.grad[order[r]] = 2.0 * d / n;
  }
  out.value /= n;
  return out;
}

LossValue textural_loss(const Tensor& pred, const Tensor& target, double beta) {
  if (beta < 0.0) throw std::invalid_argument("textural_loss: beta must be non-negative");
  LossValue out = mse(pred, target);
  if (beta == 0.0) return out;
  const LossValue sm = sm_mse(pred, target);
  out.value += beta * sm.value;
  for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += beta * sm.grad[i];
  return out;
}

Tensor softmax_channels(const Tensor& logits) {
  Tensor out(logits.shape());
  const std::size_t plane = logits.shape().plane();
  const std::size_t classes = logits.channels();
  for (std::size_t i = 0; i < plane; ++i) {
    double top = logits[i];
    for (std::size_t c = 1; c < classes; ++c) top = std::max(top, logits[c * plane + i]);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      const double e = std::exp(logits[c * plane + i] - top);
      out[c * plane + i] = e;
      sum += e;
    }
    for (std::size_t c = 0; c < classes; ++c) out[c * plane + i] /= sum;
  }
  return out;
}

LossValue softmax_parsing_loss(const Tensor& logits, const LabelMap& labels) {
  if (logits.channels() != 3) {
    throw ShapeError("softmax_parsing_loss: expected 3 logit channels, got " +
                     logits.shape().str());
  }
  if (labels.height != logits.height() || labels.width != logits.width()) {
    throw ShapeError("softmax_parsing_loss: labels " + std::to_string(labels.height) + "x" +
                     std::to_string(labels.width) + " vs logits " + logits.shape().str());
  }
  const std::size_t plane = logits.shape().plane();
  const double n = static_cast<double>(plane);
  LossValue out{0.0, Tensor(logits.shape())};
  for (std::size_t i = 0; i < plane; ++i) {
    const std::uint8_t label = labels.labels[i];
    if (label < 1 || label > 3) {
      throw std::invalid_argument("softmax_parsing_loss: label " + std::to_string(label) +
                                  " at pixel " + std::to_string(i) + " outside {1,2,3}");
    }
    const double z0 = logits[i];
    const double z1 = logits[plane + i];
    const double z2 = logits[2 * plane + i];
    const double top = std::max({z0, z1, z2});
    const double e0 = std::exp(z0 - top);
    const double e1 = std::exp(z1 - top);
    const double e2 = std::exp(z2 - top);
    const double sum = e0 + e1 + e2;
    const double log_sum = top + std::log(sum);
    const std::size_t truth = label - 1;
    out.value += log_sum - logits[truth * plane + i];
    const double p[3] = {e0 / sum, e1 / sum, e2 / sum};
    for (std::size_t c = 0; c < 3; ++c)
      out.grad[c * plane + i] = (p[c] - (c == truth ? 1.0 : 0.0)) / n;
  }
  out.value /= n;
  return out;
}

CombinedLoss combined_bfcn_loss(const LossValue& structural, const LossValue& textural,
                                double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("combined_bfcn_loss: alpha must be non-negative");
  CombinedLoss out;
  out.structural = structural.value;
  out.textural = textural.value;
  out.value = structural.value + alpha * textural.value;
  out.structural_grad = structural.grad;
  out.textural_grad = textural.grad;
  for (std::size_t i = 0; i < out.textural_grad.size(); ++i) out.textural_grad[i] *= alpha;
  return out;
}

}  // namespace sketch
