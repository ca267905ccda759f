#include "spde/rates.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "spde/error.hpp"
#include "spde/noise.hpp"
#include "spde/parallel.hpp"
#include "spde/solvers.hpp"

namespace spde {

RateAxis parse_rate_axis(std::string_view name) {
  if (name == "time") return RateAxis::Time;
  if (name == "space") return RateAxis::Space;
  throw ConfigError("unknown rate axis '" + std::string(name) + "' (expected time|space)");
}

std::string_view to_string(RateAxis axis) noexcept {
  return axis == RateAxis::Time ? "time" : "space";
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
  RateFit fit;
  std::vector<std::pair<double, double>> xy;
  for (const auto& [res, rmse] : points) {
    if (!(res > 0.0)) throw StatisticsError("resolutions must be positive");
    if (!(rmse > 0.0) || !std::isfinite(rmse)) {
      fit.warnings.push_back("dropped point at resolution " + std::to_string(res) +
                             " with rmse " + std::to_string(rmse));
      continue;
    }
    xy.emplace_back(std::log2(res), -std::log2(rmse));
  }
  fit.used_points = xy.size();
  if (xy.size() < 3)
    throw StatisticsError("rate fit needs at least 3 usable points, got " +
                          std::to_string(xy.size()));
  const double n = static_cast<double>(xy.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw StatisticsError("rate fit needs distinct resolutions");
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (const auto& [x, y] : xy) {
    const double r = y - (intercept + fit.slope * x);
    rss += r * r;
  }
  fit.stderr_slope = xy.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
  return fit;
}

std::vector<std::size_t> dyadic_grid(unsigned lo, unsigned hi) {
  std::vector<std::size_t> g;
  for (unsigned k = lo; k <= hi; ++k) g.push_back(std::size_t{1} << k);
  return g;
}

namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

RatePoint finish_point(std::size_t resolution, const Moments& mom, std::uint64_t samples) {
  const double M = static_cast<double>(samples);
  const double msq = mom.sum / M;
  const double var = samples > 1 ? std::max(0.0, (mom.sum_sq - M * msq * msq) / (M - 1.0)) : 0.0;
  RatePoint p;
  p.resolution = resolution;
  p.samples = samples;
  p.rmse = std::sqrt(msq);
  p.stderr_rmse = p.rmse > 0.0 ? std::sqrt(var / M) / (2.0 * p.rmse) : 0.0;
  return p;
}

// Squared H-norm of a - b with b living on a sub-band of a.
double diff_norm_sq(const SpectralField& a, const SpectralField& b) {
  SpectralField d = a;
  auto dd = d.dofs();
  const auto bd = b.dofs();
  for (std::size_t k = 0; k < bd.size(); ++k) dd[k] -= bd[k];
  const double n = h_norm(d);
  return n * n;
}

}  // namespace

RateStudy rmse_study(const ModelSpec& m, SchemeKind scheme, RateAxis axis,
                     std::span<const std::size_t> grid, std::size_t fixed, std::uint64_t samples,
                     std::uint64_t seed, unsigned threads) {
  if (grid.size() < 4) throw ConfigError("a rate study needs at least 4 grid points");
  if (samples < 2) throw ConfigError("a rate study needs at least 2 samples");
  for (std::size_t g : grid) require_power_of_two(g, "rate grid resolution");

  RateStudy study;
  study.axis = axis;
  study.scheme = scheme;
  study.reaction = m.reaction();
  study.b = m.b();
  study.fixed = fixed;
  study.seed = seed;

  const BlockPlan plan = plan_blocks(samples, 16, 4096);
  const std::uint64_t n_blocks = plan.blocks();
  const unsigned workers = effective_threads(n_blocks, threads);
  const std::size_t G = grid.size();
  std::vector<std::vector<Moments>> block_moments(n_blocks, std::vector<Moments>(G));

  if (axis == RateAxis::Time) {
    require_power_of_two(fixed, "fixed mode count");
    std::vector<std::vector<std::optional<CoupledPairSolver>>> solvers(workers);
    for (auto& s : solvers) s.resize(G);
    parallel_for_blocks(n_blocks, workers, [&](unsigned w, std::uint64_t b) {
      for (std::size_t g = 0; g < G; ++g) {
        auto& slot = solvers[w][g];
        if (!slot) slot.emplace(m, scheme, CoupledResolution{fixed, 2 * grid[g], fixed, grid[g]});
        for (std::uint64_t i = plan.begin(b); i < plan.end(b); ++i) {
          slot->solve({seed, static_cast<std::uint32_t>(g), i, StreamRole::Rates});
          const double e = diff_norm_sq(slot->fine(), slot->coarse());
          block_moments[b][g].sum += e;
          block_moments[b][g].sum_sq += e * e;
        }
      }
    });
  } else {
    if (fixed == 0) throw ConfigError("fixed step count must be positive");
    // Every N in the grid and 2N for the largest one.
    std::vector<std::size_t> sizes(grid.begin(), grid.end());
    for (std::size_t g : grid) sizes.push_back(2 * g);
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    auto index_of = [&](std::size_t n) {
      return static_cast<std::size_t>(std::lower_bound(sizes.begin(), sizes.end(), n) - sizes.begin());
    };
    std::vector<std::vector<std::optional<PathSolver>>> solvers(workers);
    for (auto& s : solvers) s.resize(sizes.size());
    std::vector<std::vector<SpectralField>> finals(workers, std::vector<SpectralField>(sizes.size()));
    parallel_for_blocks(n_blocks, workers, [&](unsigned w, std::uint64_t b) {
      for (std::uint64_t i = plan.begin(b); i < plan.end(b); ++i) {
        const NoiseStreamKey key{seed, 0, i, StreamRole::Rates};
        for (std::size_t s = 0; s < sizes.size(); ++s) {
          auto& slot = solvers[w][s];
          if (!slot) slot.emplace(m, scheme, sizes[s], fixed);
          finals[w][s] = slot->solve(key);
        }
        for (std::size_t g = 0; g < G; ++g) {
          const double e = diff_norm_sq(finals[w][index_of(2 * grid[g])], finals[w][index_of(grid[g])]);
          block_moments[b][g].sum += e;
          block_moments[b][g].sum_sq += e * e;
        }
      }
    });
  }

  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t g = 0; g < G; ++g) {
    Moments total;
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
      total.sum += block_moments[b][g].sum;
      total.sum_sq += block_moments[b][g].sum_sq;
    }
    study.points.push_back(finish_point(grid[g], total, samples));
    fit_points.emplace_back(static_cast<double>(grid[g]), study.points.back().rmse);
  }
  try {
    study.fit = fit_rate(fit_points);
  } catch (const StatisticsError& e) {
    study.fit = {};
    study.fit.warnings.push_back(e.what());
    for (const auto& p : fit_points)
      if (!(p.second > 0.0)) study.fit.warnings.push_back("zero rmse at resolution " + std::to_string(p.first));
  }
  return study;
}

}  // namespace spde
