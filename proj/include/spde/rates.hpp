#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spde/model.hpp"
#include "spde/scheme.hpp"

namespace spde {

enum class RateAxis { Time, Space };

RateAxis parse_rate_axis(std::string_view name);
std::string_view to_string(RateAxis axis) noexcept;

struct RatePoint {
  std::size_t resolution = 0;  // J (time axis) or N (space axis) of the coarser member
  double rmse = 0.0;
  double stderr_rmse = 0.0;
  std::uint64_t samples = 0;
};

struct RateFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  std::size_t used_points = 0;
  std::vector<std::string> warnings;
};

/// Least squares slope of -log2(rmse) against log2(resolution). Points with
/// non-positive rmse are dropped with a warning; fewer than 3 usable points is a
/// StatisticsError.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

struct RateStudy {
  RateAxis axis = RateAxis::Time;
  SchemeKind scheme = SchemeKind::ExpEuler;
  ReactionKind reaction = ReactionKind::Linear;
  double b = 0.0;
  std::size_t fixed = 0;  // N* (time axis) or J* (space axis)
  std::uint64_t seed = 0;
  std::vector<RatePoint> points;
  RateFit fit;
};

/// Monte Carlo RMSE between consecutive resolutions.
///
/// Time axis: sqrt(E||V^{N*,2J} - V^{N*,J}||^2) for J in `grid`, the pair coupled by
/// the scheme's coupling rule. Space axis: sqrt(E||V^{2N,J*} - V^{N,J*}||^2) for N in
/// `grid`; all resolutions of one sample share the increments of their common
/// modes. Sample i of grid point k uses NoiseStreamKey{seed, k, i, Rates} on the
/// time axis and {seed, 0, i, Rates} on the space axis.
RateStudy rmse_study(const ModelSpec& m, SchemeKind scheme, RateAxis axis,
                     std::span<const std::size_t> grid, std::size_t fixed, std::uint64_t samples,
                     std::uint64_t seed, unsigned threads = 0);

/// Powers of two 2^lo .. 2^hi.
std::vector<std::size_t> dyadic_grid(unsigned lo, unsigned hi);

}  // namespace spde
