#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sketch/losses.hpp"
#include "sketch/parsing.hpp"
#include "sketch/tensor.hpp"

namespace sketch {

/// Rec. 601 luma of an RGB tensor; single-channel input passes through.
Tensor to_luminance(const Tensor& image);

/// Sobel gradient magnitude with replicated borders; same size as the input.
Tensor sobel_edges(const Tensor& image);

inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

/// SSIM from whole-image statistics (one window covering everything).
double ssim(const Tensor& a, const Tensor& b);

/// SSIM between the Sobel edge maps of a photo patch (reduced to luminance)
/// and a sketch patch. Edge magnitudes are divided by their maximum possible
/// value for unit-range input (4 * sqrt 2) before comparison.
double edge_ssim(const Tensor& photo, const Tensor& sketch);

inline constexpr double kDefaultSsimThreshold = 0.6;

/// Aligned photo/sketch patches cut from the same position of one image pair.
struct PatchPair {
  Tensor photo;   // image channels, size x size
  Tensor sketch;  // 1 x size x size
  Region region = Region::face;
  double alignment_score = 1.0;
  std::size_t y = 0;  // top-left corner in the source frame
  std::size_t x = 0;
  std::uint32_t image = 0;
};

/// Scores the pair and keeps it iff the score exceeds `threshold`.
bool alignment_filter(PatchPair& pair, double threshold);

struct ExtractOptions {
  std::size_t size = 32;
  std::size_t stride = 16;
  double ssim_threshold = kDefaultSsimThreshold;
};

struct ExtractResult {
  std::vector<PatchPair> kept;
  /// Face pairs rejected by the alignment filter, scores recorded.
  std::vector<PatchPair> discarded;
  std::size_t background = 0;
};

/// Regular grid of patches. Each patch takes the majority argmax class of the
/// parsing pixels under it; background patches are dropped and only face
/// patches are alignment-filtered.
ExtractResult extract_patches(const Tensor& photo, const Tensor& sketch,
                              const ParsingMap& parsing, const ExtractOptions& options,
                              std::uint32_t image_index = 0);

/// Pixel-wise mean.
Tensor build_prior(std::span<const Tensor> images);

/// Pixel-wise mean of the one-hot encodings of the label maps.
ParsingMap build_parsing_prior(std::span<const LabelMap> labels);

inline constexpr double kAugmentLow = 0.625;
inline constexpr double kAugmentHigh = 1.125;

/// Hexcone RGB <-> HSV; every component in [0, 1] (hue as a fraction of a turn).
Tensor rgb_to_hsv(const Tensor& rgb);
Tensor hsv_to_rgb(const Tensor& hsv);

/// Scales the HSV value channel by `factor`, clamping to [0, 1]. A
/// single-channel image is treated as gray RGB, which reduces to clamped
/// scaling of the intensity.
Tensor hsv_value_augment(const Tensor& photo, double factor);

/// Draws the factor uniformly from [low, high].
Tensor hsv_value_augment(const Tensor& photo, std::mt19937_64& rng, double low = kAugmentLow,
                         double high = kAugmentHigh);

}  // namespace sketch
