#include "spde/noise.hpp"

#include <array>
#include <cmath>
#include <string>

#include "spde/error.hpp"

namespace spde {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t repetition) noexcept {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(repetition + 0x632BE59BD9B4E019ull));
}

simd::PhiloxKey philox_key(const NoiseStreamKey& key) noexcept {
  const std::uint64_t k = splitmix64(key.master_seed);
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

simd::CounterTail counter_tail(const NoiseStreamKey& key, std::uint32_t step) {
  if (key.level > 0xFF) throw UsageError("level index " + std::to_string(key.level) + " exceeds 255");
  if (key.replica >> 48)
    throw UsageError("replica index " + std::to_string(key.replica) + " exceeds 2^48");
  const auto hi = static_cast<std::uint32_t>((key.replica >> 32) & 0xFFFF);
  return {step, static_cast<std::uint32_t>(key.replica),
          hi | (key.level << 16) | (static_cast<std::uint32_t>(key.role) << 24)};
}

double increment_variance(SchemeKind scheme, double lambda, double q, double dt) {
  if (q < 0.0) throw ModelError("negative noise weight");
  if (scheme == SchemeKind::ExpEuler) return -q * std::expm1(-2.0 * lambda * dt) / (2.0 * lambda);
  const double e = std::exp(-lambda * dt);
  return q * e * e * dt;
}

namespace {

std::complex<double> draw_mode(std::ptrdiff_t n, double variance, const NoiseStreamKey& key,
                               std::uint32_t step) {
  const auto slot = static_cast<std::uint32_t>(n < 0 ? -n : n);
  std::array<double, 2> z{};
  simd::scalar_kernels().normal_pairs(philox_key(key), counter_tail(key, step), slot, z);
  if (n == 0) return {std::sqrt(variance) * z[0], 0.0};
  const double s = std::sqrt(0.5 * variance);
  const std::complex<double> c{s * z[0], s * z[1]};
  return n < 0 ? std::conj(c) : c;
}

FineIncrementPair sample_pair(SchemeKind scheme, std::ptrdiff_t n, double dt, const ModelSpec& m,
                              const NoiseStreamKey& key, std::uint32_t coarse_step) {
  if (!(dt > 0.0)) throw UsageError("time step must be positive");
  const double var = increment_variance(scheme, m.lambda(n), m.q(n), dt);
  return {scheme, dt, draw_mode(n, var, key, 2 * coarse_step),
          draw_mode(n, var, key, 2 * coarse_step + 1)};
}

}  // namespace

FineIncrementPair sample_ou_increment(std::ptrdiff_t n, double dt, const ModelSpec& m,
                                      const NoiseStreamKey& key, std::uint32_t coarse_step) {
  return sample_pair(SchemeKind::ExpEuler, n, dt, m, key, coarse_step);
}

FineIncrementPair sample_brownian_increment(std::ptrdiff_t n, double dt, const ModelSpec& m,
                                            const NoiseStreamKey& key, std::uint32_t coarse_step) {
  return sample_pair(SchemeKind::Milstein, n, dt, m, key, coarse_step);
}

std::complex<double> couple_coarse(const FineIncrementPair& fine, std::ptrdiff_t n, double dt,
                                   SchemeKind scheme, const ModelSpec& m) {
  const bool fine_is_ou = fine.scheme == SchemeKind::ExpEuler;
  const bool want_ou = scheme == SchemeKind::ExpEuler;
  if (fine_is_ou != want_ou)
    throw UsageError("increments generated for " + std::string(to_string(fine.scheme)) +
                     " cannot be coupled as " + std::string(to_string(scheme)));
  if (fine.dt != dt) throw UsageError("coupling step differs from the generation step");
  const double a = std::exp(-m.lambda(n) * dt);
  if (want_ou) return a * fine.first + fine.second;
  return a * (fine.first + fine.second);
}

std::vector<double> dof_profile(std::size_t n_modes, double real_only_imag,
                                const std::function<double(std::ptrdiff_t)>& value) {
  const std::size_t half = n_modes / 2;
  std::vector<double> out(n_modes + 2);
  for (std::size_t k = 0; k <= half; ++k) {
    const double v = value(static_cast<std::ptrdiff_t>(k));
    out[2 * k] = v;
    out[2 * k + 1] = (k == 0 || k == half) ? real_only_imag : v;
  }
  return out;
}

IncrementGenerator::IncrementGenerator(const ModelSpec& m, SchemeKind scheme, std::size_t n_modes,
                                       double dt)
    : scheme_(scheme), n_modes_(n_modes), dt_(dt) {
  require_power_of_two(n_modes, "mode count");
  if (!(dt > 0.0)) throw UsageError("time step must be positive");
  const std::size_t half = n_modes / 2;
  stddev_.assign(n_modes + 2, 0.0);
  for (std::size_t k = 0; k <= half; ++k) {
    const auto n = static_cast<std::ptrdiff_t>(k);
    const double var = increment_variance(scheme, m.lambda(n), m.q(n), dt);
    if (k == 0) {
      stddev_[0] = std::sqrt(var);
    } else {
      const double s = std::sqrt(0.5 * var);
      stddev_[2 * k] = s;
      stddev_[2 * k + 1] = k == half ? 0.0 : s;
    }
  }
  decay_ = dof_profile(n_modes, 0.0, [&](std::ptrdiff_t n) { return std::exp(-m.lambda(n) * dt); });
  normals_.resize(n_modes + 2);
}

void IncrementGenerator::generate(const NoiseStreamKey& key, std::uint32_t step,
                                  std::span<double> out, OpCounter* ops) {
  if (out.size() != n_modes_ + 2) throw UsageError("increment buffer has the wrong length");
  const auto& k = simd::kernels();
  k.normal_pairs(philox_key(key), counter_tail(key, step), 0, normals_);
  k.scale(stddev_, normals_, out);
  if (ops) ops->gaussian_draws += n_modes_;
}

void couple_increments(SchemeKind scheme, std::span<const double> decay,
                       std::span<const double> fine_first, std::span<const double> fine_second,
                       std::span<double> coarse, OpCounter* ops) {
  const std::size_t n = coarse.size();
  if (decay.size() < n || fine_first.size() < n || fine_second.size() < n)
    throw UsageError("coarse band exceeds the fine increments");
  const auto& k = simd::kernels();
  if (scheme == SchemeKind::ExpEuler)
    k.couple_weighted(decay.first(n), fine_first.first(n), fine_second.first(n), coarse);
  else
    k.couple_summed(decay.first(n), fine_first.first(n), fine_second.first(n), coarse);
  coarse[n - 1] = 0.0;  // imaginary part of the coarse Nyquist mode
  if (ops) ops->arithmetic += n - 2;
}

}  // namespace spde
