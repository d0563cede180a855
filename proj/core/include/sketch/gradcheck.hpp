#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sketch/network.hpp"

namespace sketch {

struct GradCheckReport {
  std::string target;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  std::size_t checked = 0;

  bool passed(double tolerance = 1e-4) const { return max_rel_error < tolerance; }
};

/// Relative error |a - n| / max(|a|, |n|, floor). The floor keeps
/// coordinates whose true derivative vanishes from dividing by round-off.
inline constexpr double kGradCheckFloor = 1e-6;

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Compares `analytic` against central differences of `f` at `x`, coordinate
/// by coordinate. Coordinates for which `skip(i)` is true are not checked.
GradCheckReport gradient_check(const ScalarFunction& f, std::span<const double> x,
                               std::span<const double> analytic, double epsilon = 1e-5,
                               const std::function<bool(std::size_t)>& skip = {});

std::vector<double> flatten(const NetworkWeights& weights);
void unflatten(std::span<const double> values, NetworkWeights& weights);

/// Names accepted by run_gradcheck_target.
std::span<const std::string_view> gradcheck_targets();

/// Builds a small random problem for the named operation or network and
/// checks its analytic gradient. Throws std::invalid_argument for unknown names.
GradCheckReport run_gradcheck_target(std::string_view target, std::uint64_t seed,
                                     double epsilon = 1e-5);

}  // namespace sketch
