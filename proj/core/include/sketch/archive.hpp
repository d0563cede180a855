#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sketch/data.hpp"
#include "sketch/trainer.hpp"

namespace sketch {

// Prepared-dataset files. All integers and floats little-endian.
//
// Pair archive ("SKPA"):
//   magic "SKPA", u32 version (1), u32 photo channels C, u32 patch size S,
//   u32 kept count, u32 discarded count, then one record per pair, kept
//   pairs first:
//     u8 region (1 face, 2 hair), u32 image index, u32 y, u32 x,
//     f64 alignment score, f64 photo[C*S*S], f64 sketch[S*S]
//
// Parsing-sample archive ("SKPS"):
//   magic "SKPS", u32 version (1), u32 count, u32 photo channels C,
//   u32 height H, u32 width W, u32 label height, u32 label width, then per
//   sample: f64 photo[C*H*W], u8 labels[label height * label width]

struct PairArchive {
  std::size_t photo_channels = 1;
  std::size_t patch_size = 32;
  std::vector<PatchPair> kept;
  /// Face pairs the alignment filter rejected.
  std::vector<PatchPair> discarded;
};

void save_pair_archive(const PairArchive& archive, const std::filesystem::path& path);
PairArchive load_pair_archive(const std::filesystem::path& path);

void save_parsing_samples(const std::vector<ParsingSample>& samples,
                          const std::filesystem::path& path);
std::vector<ParsingSample> load_parsing_samples(const std::filesystem::path& path);

}  // namespace sketch
