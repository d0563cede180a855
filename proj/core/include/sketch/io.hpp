#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sketch/losses.hpp"
#include "sketch/network.hpp"
#include "sketch/tensor.hpp"

namespace sketch {

/// Malformed or unreadable file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weight file written for a different network spec.
class IncompatibleWeights : public FormatError {
 public:
  using FormatError::FormatError;
};

// Weight file layout, all integers and floats little-endian:
//
//   offset  size  field
//   0       4     magic "SKWT"
//   4       4     u32 format version (1)
//   8       8     u64 spec hash (FNV-1a 64 of NetworkSpec::describe())
//   16      4     u32 layer count L
//   then L records:
//           16    u32 out_channels, in_channels, kh, kw
//           4*N   f32 kernel, N = out*in*kh*kw, (o, i, y, x) row-major
//           4*out f32 bias
//
// The file ends exactly after the last record.
inline constexpr std::uint32_t kWeightFormatVersion = 1;

void save_weights(const NetworkWeights& weights, const std::filesystem::path& path);
void write_weights(const NetworkWeights& weights, std::ostream& out);

/// Reads a weight file and checks it against `spec`: a differing spec hash
/// raises IncompatibleWeights, a layer shape disagreeing with the spec raises
/// FormatError.
NetworkWeights load_weights(const std::filesystem::path& path, const NetworkSpec& spec);
NetworkWeights read_weights(std::istream& in, const NetworkSpec& spec);

/// Binary PGM (P5) for one channel, binary PPM (P6) for three. Samples are
/// scaled to [0, 1] on read; on write they are clamped and rounded to 0..255.
Tensor read_pnm(const std::filesystem::path& path);
void write_pnm(const Tensor& image, const std::filesystem::path& path);

/// 8-bit PNG export of a one- or three-channel image.
void write_png(const Tensor& image, const std::filesystem::path& path);

/// Label maps are PGM files whose raw sample values are class ids
/// (1 face, 2 hair, 3 background).
LabelMap read_label_map(const std::filesystem::path& path);
void write_label_map(const LabelMap& labels, const std::filesystem::path& path);

}  // namespace sketch
