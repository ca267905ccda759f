#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spde/model.hpp"
#include "spde/noise.hpp"
#include "spde/scheme.hpp"
#include "spde/spectral.hpp"

namespace spde {

/// How (N_l, J_l) and the number of levels L follow from l and epsilon.
///   PaperExpEuler  J = 2^{l+2}, N = 2 ceil(2^{l/(2 phi) + 1}),  L = ceil(log2(1/eps)/alpha)
///   PaperMilstein  J = 2^{l+2}, N = 2 ceil(2^{l/2 + 1}),        L = ceil(log2(1/eps)/phi) - 2
///   Theorem2       J = 2^l J0,  N = ceil(N0 2^{l/(2 phi)}),      L = ceil(log2(log2(1/eps)/eps))
///   Theorem3       J = 2^l J0,  N = ceil(N0 2^{l/2}),            L = ceil(log2(1/eps)/alpha)
/// N is rounded up to a power of two in every case.
enum class LevelRule { PaperExpEuler, PaperMilstein, Theorem2, Theorem3 };

LevelRule parse_level_rule(std::string_view name);
std::string_view to_string(LevelRule rule) noexcept;

/// Model: V_l = 2^{-beta l}. Measured: V_l from a pilot run of coupled pairs.
enum class VarianceMode { Model, Measured };

VarianceMode parse_variance_mode(std::string_view name);
std::string_view to_string(VarianceMode mode) noexcept;

/// Weak rate alpha, variance rate beta, cost rate gamma.
struct RateTriple {
  double alpha = 1.0;
  double beta = 2.0;
  double gamma = 2.0;
};

/// ExpEuler: (1, 2, 1 + 1/(2 phi)); drift-exponential and Milstein: (phi, 2 phi, 3/2).
RateTriple default_rates(SchemeKind scheme, double phi) noexcept;
LevelRule default_level_rule(SchemeKind scheme) noexcept;

struct LevelResolution {
  std::size_t level = 0;
  std::size_t n_modes = 0;      // power of two used by the solver
  std::size_t n_modes_raw = 0;  // value of the rule before rounding
  std::size_t n_steps = 0;
  SchemeKind scheme = SchemeKind::ExpEuler;
  RateTriple rates;
};

struct MlmcConfig {
  double epsilon = 0.0625;
  SchemeKind scheme = SchemeKind::ExpEuler;
  LevelRule rule = LevelRule::PaperExpEuler;
  RateTriple rates;
  double phi = 0.5;
  std::size_t j0 = 4;
  std::size_t n0 = 4;
  std::uint64_t multiplier_first = 20;
  std::uint64_t multiplier_rest = 5;
  VarianceMode variance_mode = VarianceMode::Model;
  std::uint64_t pilot_samples = 64;
  std::optional<std::size_t> levels_override;  // forces L
  unsigned threads = 0;                        // 0 = all cores

  /// Throws ConfigError on epsilon outside (0,1), alpha < min(beta, gamma)/2,
  /// non-positive multipliers or base resolutions.
  void validate() const;
};

/// Paper defaults for the scheme at the model's nominal phi.
MlmcConfig make_mlmc_config(const ModelSpec& m, SchemeKind scheme, double epsilon);

std::size_t choose_num_levels(double epsilon, double alpha, LevelRule rule, double phi);
std::size_t choose_num_levels(const MlmcConfig& config);

LevelResolution level_resolutions(std::size_t level, const MlmcConfig& config);

/// C_l = (l + 1) 2^{gamma l}.
double model_cost(std::size_t level, double gamma) noexcept;
/// V_l = 2^{-beta l}.
double model_variance(std::size_t level, double beta) noexcept;

/// M_l = mult_l ceil(2 eps^{-2} sqrt(V_l/C_l) sum_j sqrt(V_j C_j)), at least mult_l.
std::vector<std::uint64_t> allocate_samples(const MlmcConfig& config, std::size_t num_levels,
                                            std::span<const double> variances,
                                            std::span<const double> costs);

struct LevelReport {
  std::size_t level = 0;
  std::size_t n_modes = 0;
  std::size_t n_modes_raw = 0;
  std::size_t n_steps = 0;
  std::size_t coarse_modes = 0;
  std::size_t coarse_steps = 0;
  std::uint64_t samples = 0;
  double v_model = 0.0;
  double v_used = 0.0;      // the variance that entered the allocation
  double v_measured = 0.0;  // mean of ||U^F - U^C||_H^2
  double c_model = 0.0;
  double mean_norm = 0.0;   // ||level mean||_H
  double centered_variance = 0.0;  // sample variance of U^F - U^C summed over modes
  std::uint64_t ops = 0;
  double seconds = 0.0;
};

struct MlmcReport {
  SchemeKind scheme = SchemeKind::ExpEuler;
  LevelRule rule = LevelRule::PaperExpEuler;
  VarianceMode variance_mode = VarianceMode::Model;
  RateTriple rates;
  double epsilon = 0.0;
  double phi = 0.0;
  std::size_t num_levels = 0;  // L; levels 0..L
  std::uint64_t master_seed = 0;
  std::vector<LevelReport> levels;
  SpectralField mean;          // on the finest band
  double total_model_cost = 0.0;
  std::uint64_t total_ops = 0;
  double total_seconds = 0.0;

  /// sum_l centered_variance_l / M_l: variance of the estimator in H.
  double estimator_variance() const noexcept;
};

double total_cost(const MlmcReport& report) noexcept;

using LevelCallback = std::function<void(const LevelReport&)>;

/// Telescoping estimator sum_l E_{M_l}[U^{l,F} - U^{l-1,C}]. Sample m of level l
/// is driven by NoiseStreamKey{seed, l, m, role}. Per-level sums are formed in
/// fixed replica blocks merged in order, so the report does not depend on the
/// thread count.
MlmcReport run_estimator(const ModelSpec& m, const MlmcConfig& config, std::uint64_t master_seed,
                         StreamRole role = StreamRole::Estimator,
                         const LevelCallback& on_level = {});

/// Mean and mean square of ||U^F - U^C||_H over `samples` coupled pairs of one
/// level, reduced deterministically.
struct LevelStatistics {
  SpectralField sum;     // sum of differences on the fine band
  double sum_sq = 0.0;   // sum of squared H-norms
  std::uint64_t samples = 0;
  std::uint64_t ops = 0;
};
LevelStatistics sample_level(const ModelSpec& m, SchemeKind scheme, std::size_t level,
                             const LevelResolution& fine, const LevelResolution* coarse,
                             std::uint64_t samples, std::uint64_t master_seed, StreamRole role,
                             unsigned threads);

}  // namespace spde
