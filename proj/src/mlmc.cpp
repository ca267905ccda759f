#include "spde/mlmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "spde/error.hpp"
#include "spde/parallel.hpp"
#include "spde/solvers.hpp"

namespace spde {

namespace {
// ceil that forgives representation error of values meant to be integers.
double robust_ceil(double x) noexcept { return std::ceil(x - 1e-12 * std::max(1.0, std::abs(x))); }
}  // namespace

LevelRule parse_level_rule(std::string_view name) {
  if (name == "paper-exp-euler") return LevelRule::PaperExpEuler;
  if (name == "paper-milstein") return LevelRule::PaperMilstein;
  if (name == "theorem2") return LevelRule::Theorem2;
  if (name == "theorem3") return LevelRule::Theorem3;
  throw ConfigError("unknown level rule '" + std::string(name) +
                    "' (expected paper-exp-euler|paper-milstein|theorem2|theorem3)");
}

std::string_view to_string(LevelRule rule) noexcept {
  switch (rule) {
    case LevelRule::PaperExpEuler: return "paper-exp-euler";
    case LevelRule::PaperMilstein: return "paper-milstein";
    case LevelRule::Theorem2: return "theorem2";
    case LevelRule::Theorem3: return "theorem3";
  }
  return "unknown";
}

VarianceMode parse_variance_mode(std::string_view name) {
  if (name == "model") return VarianceMode::Model;
  if (name == "measured") return VarianceMode::Measured;
  throw ConfigError("unknown variance mode '" + std::string(name) + "' (expected model|measured)");
}

std::string_view to_string(VarianceMode mode) noexcept {
  return mode == VarianceMode::Model ? "model" : "measured";
}

RateTriple default_rates(SchemeKind scheme, double phi) noexcept {
  if (scheme == SchemeKind::ExpEuler) return {1.0, 2.0, 1.0 + 1.0 / (2.0 * phi)};
  return {phi, 2.0 * phi, 1.5};
}

LevelRule default_level_rule(SchemeKind scheme) noexcept {
  return scheme == SchemeKind::ExpEuler ? LevelRule::PaperExpEuler : LevelRule::PaperMilstein;
}

void MlmcConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  if (!(phi > 0.0 && phi < 1.0)) throw ConfigError("phi must lie in (0, 1)");
  if (!(rates.alpha > 0.0 && rates.beta > 0.0 && rates.gamma > 0.0))
    throw ConfigError("rates must be positive");
  if (rates.alpha < 0.5 * std::min(rates.beta, rates.gamma) - 1e-12)
    throw ConfigError("alpha must be at least min(beta, gamma)/2");
  if (multiplier_first == 0 || multiplier_rest == 0)
    throw ConfigError("sample multipliers must be positive");
  if (j0 == 0 || n0 == 0) throw ConfigError("base resolutions must be positive");
  if (variance_mode == VarianceMode::Measured && pilot_samples < 2)
    throw ConfigError("pilot runs need at least 2 samples");
}

MlmcConfig make_mlmc_config(const ModelSpec& m, SchemeKind scheme, double epsilon) {
  MlmcConfig c;
  c.epsilon = epsilon;
  c.scheme = scheme;
  c.phi = m.phi_nominal();
  c.rule = default_level_rule(scheme);
  c.rates = default_rates(scheme, c.phi);
  return c;
}

std::size_t choose_num_levels(double epsilon, double alpha, LevelRule rule, double phi) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  const double inv = std::log2(1.0 / epsilon);
  double l = 0.0;
  switch (rule) {
    case LevelRule::PaperExpEuler:
    case LevelRule::Theorem3: l = robust_ceil(inv / alpha); break;
    case LevelRule::PaperMilstein: l = robust_ceil(inv / phi) - 2.0; break;
    case LevelRule::Theorem2: l = robust_ceil(std::log2(inv / epsilon)); break;
  }
  return l <= 0.0 ? 0 : static_cast<std::size_t>(l);
}

std::size_t choose_num_levels(const MlmcConfig& config) {
  if (config.levels_override) return *config.levels_override;
  return choose_num_levels(config.epsilon, config.rates.alpha, config.rule, config.phi);
}

LevelResolution level_resolutions(std::size_t level, const MlmcConfig& config) {
  const double l = static_cast<double>(level);
  LevelResolution r;
  r.level = level;
  r.scheme = config.scheme;
  r.rates = config.rates;
  double raw = 0.0;
  switch (config.rule) {
    case LevelRule::PaperExpEuler:
      r.n_steps = std::size_t{1} << (level + 2);
      raw = 2.0 * robust_ceil(std::exp2(l / (2.0 * config.phi) + 1.0));
      break;
    case LevelRule::PaperMilstein:
      r.n_steps = std::size_t{1} << (level + 2);
      raw = 2.0 * robust_ceil(std::exp2(l / 2.0 + 1.0));
      break;
    case LevelRule::Theorem2:
      r.n_steps = config.j0 << level;
      raw = robust_ceil(static_cast<double>(config.n0) * std::exp2(l / (2.0 * config.phi)));
      break;
    case LevelRule::Theorem3:
      r.n_steps = config.j0 << level;
      raw = robust_ceil(static_cast<double>(config.n0) * std::exp2(l / 2.0));
      break;
  }
  r.n_modes_raw = static_cast<std::size_t>(raw);
  r.n_modes = std::max<std::size_t>(2, next_power_of_two(r.n_modes_raw));
  return r;
}

double model_cost(std::size_t level, double gamma) noexcept {
  return static_cast<double>(level + 1) * std::exp2(gamma * static_cast<double>(level));
}

double model_variance(std::size_t level, double beta) noexcept {
  return std::exp2(-beta * static_cast<double>(level));
}

std::vector<std::uint64_t> allocate_samples(const MlmcConfig& config, std::size_t num_levels,
                                            std::span<const double> variances,
                                            std::span<const double> costs) {
  if (variances.size() != num_levels + 1 || costs.size() != num_levels + 1)
    throw UsageError("need one variance and one cost per level");
  double sum = 0.0;
  for (std::size_t j = 0; j <= num_levels; ++j) {
    if (!(variances[j] >= 0.0) || !(costs[j] > 0.0))
      throw UsageError("variances must be non-negative and costs positive");
    sum += std::sqrt(variances[j] * costs[j]);
  }
  const double scale = 2.0 / (config.epsilon * config.epsilon) * sum;
  std::vector<std::uint64_t> m(num_levels + 1);
  for (std::size_t l = 0; l <= num_levels; ++l) {
    const double base = std::max(1.0, robust_ceil(scale * std::sqrt(variances[l] / costs[l])));
    if (base > 1e18) throw ConfigError("sample count overflows");
    m[l] = (l == 0 ? config.multiplier_first : config.multiplier_rest) *
           static_cast<std::uint64_t>(base);
  }
  return m;
}

double MlmcReport::estimator_variance() const noexcept {
  double v = 0.0;
  for (const auto& l : levels)
    if (l.samples > 0) v += l.centered_variance / static_cast<double>(l.samples);
  return v;
}

double total_cost(const MlmcReport& report) noexcept {
  double c = 0.0;
  for (const auto& l : report.levels) c += static_cast<double>(l.samples) * l.c_model;
  return c;
}

namespace {

struct BlockResult {
  std::vector<double> sum;
  double sum_sq = 0.0;
  std::uint64_t ops = 0;
};

}  // namespace

LevelStatistics sample_level(const ModelSpec& m, SchemeKind scheme, std::size_t level,
                             const LevelResolution& fine, const LevelResolution* coarse,
                             std::uint64_t samples, std::uint64_t master_seed, StreamRole role,
                             unsigned threads) {
  CoupledResolution res{fine.n_modes, fine.n_steps, 0, 0};
  if (coarse) {
    res.coarse_modes = coarse->n_modes;
    res.coarse_steps = coarse->n_steps;
  }
  validate_resolution(res);

  const std::size_t n_dofs = fine.n_modes + 2;
  const BlockPlan plan = plan_blocks(samples);
  const std::uint64_t n_blocks = plan.blocks();
  const unsigned workers = effective_threads(n_blocks, threads);

  std::vector<std::optional<CoupledPairSolver>> solvers(workers);
  std::vector<SpectralField> diffs(workers, SpectralField(fine.n_modes));

  LevelStatistics stats;
  stats.sum = SpectralField(fine.n_modes);
  stats.samples = samples;
  auto total = stats.sum.dofs();

  // Blocks are processed in waves so that at most `wave` partial sums are alive.
  const std::uint64_t wave = std::max<std::uint64_t>(1, 16ull * workers);
  std::vector<BlockResult> results;
  for (std::uint64_t first = 0; first < n_blocks; first += wave) {
    const std::uint64_t count = std::min(wave, n_blocks - first);
    results.assign(count, {});
    parallel_for_blocks(count, workers, [&](unsigned w, std::uint64_t local) {
      if (!solvers[w]) solvers[w].emplace(m, scheme, res);
      CoupledPairSolver& solver = *solvers[w];
      SpectralField& diff = diffs[w];
      BlockResult& out = results[local];
      out.sum.assign(n_dofs, 0.0);
      OpCounter ops;
      const std::uint64_t b = first + local;
      for (std::uint64_t i = plan.begin(b); i < plan.end(b); ++i) {
        solver.solve({master_seed, static_cast<std::uint32_t>(level), i, role}, &ops);
        const auto f = solver.fine().dofs();
        const auto c = solver.coarse().dofs();
        auto d = diff.dofs();
        std::copy(f.begin(), f.end(), d.begin());
        // Same as fine - pad(coarse): the coarse dofs are a prefix of the fine ones.
        for (std::size_t k = 0; k < c.size(); ++k) d[k] -= c[k];
        const double norm = h_norm(diff);
        out.sum_sq += norm * norm;
        for (std::size_t k = 0; k < n_dofs; ++k) out.sum[k] += d[k];
      }
      out.ops = ops.total();
    });
    for (const auto& r : results) {
      for (std::size_t k = 0; k < n_dofs; ++k) total[k] += r.sum[k];
      stats.sum_sq += r.sum_sq;
      stats.ops += r.ops;
    }
  }
  return stats;
}

MlmcReport run_estimator(const ModelSpec& m, const MlmcConfig& config, std::uint64_t master_seed,
                         StreamRole role, const LevelCallback& on_level) {
  config.validate();
  const std::size_t L = choose_num_levels(config);
  if (L > 40) throw ConfigError("number of levels " + std::to_string(L) + " is out of range");

  std::vector<LevelResolution> res(L + 1);
  for (std::size_t l = 0; l <= L; ++l) res[l] = level_resolutions(l, config);

  std::vector<double> v_model(L + 1);
  std::vector<double> c_model(L + 1);
  for (std::size_t l = 0; l <= L; ++l) {
    v_model[l] = model_variance(l, config.rates.beta);
    c_model[l] = model_cost(l, config.rates.gamma);
  }
  std::vector<double> v_used = v_model;
  if (config.variance_mode == VarianceMode::Measured) {
    for (std::size_t l = 0; l <= L; ++l) {
      const auto pilot = sample_level(m, config.scheme, l, res[l], l ? &res[l - 1] : nullptr,
                                      config.pilot_samples, master_seed, StreamRole::Pilot,
                                      config.threads);
      v_used[l] = std::max(pilot.sum_sq / static_cast<double>(pilot.samples), 1e-300);
    }
  }
  const auto samples = allocate_samples(config, L, v_used, c_model);

  MlmcReport report;
  report.scheme = config.scheme;
  report.rule = config.rule;
  report.variance_mode = config.variance_mode;
  report.rates = config.rates;
  report.epsilon = config.epsilon;
  report.phi = config.phi;
  report.num_levels = L;
  report.master_seed = master_seed;
  report.mean = SpectralField(res[L].n_modes);

  for (std::size_t l = 0; l <= L; ++l) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto stats = sample_level(m, config.scheme, l, res[l], l ? &res[l - 1] : nullptr,
                                    samples[l], master_seed, role, config.threads);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double M = static_cast<double>(samples[l]);
    SpectralField level_mean = stats.sum * (1.0 / M);
    const double mean_norm = h_norm(level_mean);

    LevelReport lr;
    lr.level = l;
    lr.n_modes = res[l].n_modes;
    lr.n_modes_raw = res[l].n_modes_raw;
    lr.n_steps = res[l].n_steps;
    lr.coarse_modes = l ? res[l - 1].n_modes : 0;
    lr.coarse_steps = l ? res[l - 1].n_steps : 0;
    lr.samples = samples[l];
    lr.v_model = v_model[l];
    lr.v_used = v_used[l];
    lr.v_measured = stats.sum_sq / M;
    lr.c_model = c_model[l];
    lr.mean_norm = mean_norm;
    lr.centered_variance =
        samples[l] > 1 ? std::max(0.0, (stats.sum_sq - M * mean_norm * mean_norm) / (M - 1.0)) : 0.0;
    lr.ops = stats.ops;
    lr.seconds = secs;

    report.mean += pad(level_mean, report.mean.n_modes());
    report.total_ops += stats.ops;
    report.total_seconds += secs;
    report.levels.push_back(lr);
    if (on_level) on_level(lr);
  }
  report.total_model_cost = total_cost(report);
  return report;
}

}  // namespace spde
