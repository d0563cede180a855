#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sketch/data.hpp"
#include "sketch/losses.hpp"
#include "sketch/network.hpp"

namespace sketch {

/// The reference rate 1e-10 applies to 0..255 intensities; with pixels in
/// [0, 1] the squared-error gradients shrink by 255^2, so the equivalent rate
/// is 1e-10 * 255^2.
inline constexpr double kReferenceBfcnRate = 1e-10;
inline constexpr double kDefaultBfcnRate = kReferenceBfcnRate * 255.0 * 255.0;

struct TrainConfig {
  double alpha = 1.0;
  double beta = 10.0;
  /// Scale on the structural term; 0 silences the face stream.
  double structural_weight = 1.0;
  double lr_bfcn = kDefaultBfcnRate;
  double lr_pnet = 1e-3;
  double momentum = 0.0;
  std::size_t epochs_bfcn = 150;
  std::size_t epochs_pnet = 100;
  /// Patches per BFCN step (half face, half hair) or images per P-Net step.
  std::size_t batch_size = 16;
  std::size_t patch_size = 32;
  std::size_t stride = 16;
  double ssim_threshold = kDefaultSsimThreshold;
  bool augment = false;
  double augment_low = kAugmentLow;
  double augment_high = kAugmentHigh;
  /// Replace the prior channels with zeros.
  bool no_prior = false;
  double init_std = 0.01;
  std::uint64_t seed = 1;
  /// Worker threads for per-sample gradients; 0 picks the hardware count.
  std::size_t threads = 0;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss_s = 0.0;
  double loss_t = 0.0;
  double loss_g = 0.0;
  double loss_p = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::string weights_path;

  /// CSV with header "epoch,loss_s,loss_t,loss_g,loss_p,seconds". Timing is
  /// written as 0 unless `include_timing` is set, so seeded reruns produce
  /// identical files.
  void write_csv(const std::filesystem::path& path, bool include_timing = false) const;
};

/// Plain (or momentum) gradient descent on every parameter.
class SgdOptimizer {
 public:
  SgdOptimizer(double lr, double momentum = 0.0) : lr_(lr), momentum_(momentum) {}
  void step(NetworkWeights& weights, const NetworkWeights& grads);

 private:
  double lr_;
  double momentum_;
  std::vector<ConvParams> velocity_;
};

/// w <- w - lr * g for every parameter.
void sgd_step(NetworkWeights& weights, const NetworkWeights& grads, double lr);

/// Input tensor for the sketch network: photo channels followed by the prior channel.
Tensor bfcn_input(const Tensor& photo, const Tensor& prior);

/// Input tensor for the parsing network: photo channels followed by the three prior maps.
Tensor pnet_input(const Tensor& photo, const ParsingMap& prior);

struct BfcnResult {
  NetworkWeights weights;
  TrainReport report;
};

/// Trains the branched network on region-tagged patch pairs. `prior` is the
/// mean sketch in the coordinate frame of the pair origins. Face pairs train
/// the structural branch with MSE, hair pairs the textural branch with
/// MSE + beta * SM-MSE; the shared trunk receives both.
BfcnResult train_bfcn(std::span<const PatchPair> pairs, const Tensor& prior,
                      const NetworkSpec& spec, const TrainConfig& config,
                      const NetworkWeights* initial = nullptr);

struct ParsingSample {
  Tensor photo;     // image channels at network input size
  LabelMap labels;  // at network output size
};

struct PnetResult {
  NetworkWeights weights;
  TrainReport report;
};

PnetResult train_pnet(std::span<const ParsingSample> samples, const ParsingMap& prior,
                      const NetworkSpec& spec, const TrainConfig& config,
                      const NetworkWeights* initial = nullptr);

/// Fraction of output pixels whose argmax class equals the label.
double pnet_pixel_accuracy(std::span<const ParsingSample> samples, const ParsingMap& prior,
                           const NetworkSpec& spec, const NetworkWeights& weights);

}  // namespace sketch
