#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sketch/tensor.hpp"

namespace sketch {

/// Scalar objective value together with its gradient w.r.t. the prediction.
struct LossValue {
  double value = 0.0;
  Tensor grad;
};

/// indices[r] is the flat index of the element holding rank r in ascending
/// order. Equal values keep their original relative order.
std::vector<std::size_t> sort_permutation(std::span<const double> values);

LossValue mse(const Tensor& pred, const Tensor& target);

/// Sorted-matching MSE: both operands are flattened and sorted ascending, then
/// compared element by element. The gradient flows back to each prediction
/// pixel through the prediction's sort permutation, which is held constant.
LossValue sm_mse(const Tensor& pred, const Tensor& target);

/// mse + beta * sm_mse.
LossValue textural_loss(const Tensor& pred, const Tensor& target, double beta);

enum class Region : std::uint8_t { face = 1, hair = 2, background = 3 };

/// Per-pixel class labels (values 1..3, see Region).
struct LabelMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> labels;

  LabelMap() = default;
  LabelMap(std::size_t h, std::size_t w, Region fill = Region::background)
      : height(h), width(w), labels(h * w, static_cast<std::uint8_t>(fill)) {}

  std::uint8_t& at(std::size_t y, std::size_t x) { return labels[y * width + x]; }
  std::uint8_t at(std::size_t y, std::size_t x) const { return labels[y * width + x]; }
  bool operator==(const LabelMap&) const = default;
};

/// Channel-wise softmax of 3-channel logits (face, hair, background).
Tensor softmax_channels(const Tensor& logits);

/// Mean negative log-likelihood of the labelled class under a per-pixel softmax.
LossValue softmax_parsing_loss(const Tensor& logits, const LabelMap& labels);

struct CombinedLoss {
  double value = 0.0;
  double structural = 0.0;
  double textural = 0.0;
  Tensor structural_grad;
  Tensor textural_grad;
};

/// structural + alpha * textural, with the textural gradient scaled by alpha.
CombinedLoss combined_bfcn_loss(const LossValue& structural, const LossValue& textural,
                                double alpha);

}  // namespace sketch
