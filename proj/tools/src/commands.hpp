#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "sketch/network.hpp"
#include "sketch/tensor.hpp"

namespace sketch::cli {

// Canonical frames (height x width).
inline constexpr std::size_t kSketchHeight = 250;
inline constexpr std::size_t kSketchWidth = 200;
inline constexpr std::size_t kFrameHeight = 200;
inline constexpr std::size_t kFrameWidth = 156;
inline constexpr std::size_t kParseHeight = 200;
inline constexpr std::size_t kParseWidth = 156;

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv and runs the selected subcommand. Returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

struct TrunkTiming {
  double shared_ms = 0.0;
  double unshared_ms = 0.0;
  bool identical = false;
};

/// One shared-trunk and one duplicated-trunk forward per repetition.
std::vector<TrunkTiming> bench_trunk(const Tensor& input, const NetworkSpec& spec,
                                     const NetworkWeights& weights, std::size_t repetitions);

/// Photo read from disk as luminance, or as RGB when `rgb` is set (gray input
/// is replicated), resized to height x width.
Tensor load_photo(const std::filesystem::path& path, bool rgb, std::size_t height,
                  std::size_t width);

}  // namespace sketch::cli
