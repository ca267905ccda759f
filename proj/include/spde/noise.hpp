#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spde/model.hpp"
#include "spde/reaction.hpp"
#include "spde/scheme.hpp"
#include "spde/simd/kernels.hpp"

namespace spde {

/// Purpose tag separating otherwise identical streams.
enum class StreamRole : std::uint8_t { Estimator = 0, Reference = 1, Rates = 2, Pilot = 3, Demo = 4 };

/// Identifies one driving-noise realization.
///
/// The Philox counter of a draw is (mode, step, replica_lo, replica_hi | level | role)
/// and the key is derived from master_seed, so two keys that differ in any field
/// address disjoint parts of the counter space. The draw for (mode, step) does not
/// depend on the number of modes or steps of the path that consumes it.
struct NoiseStreamKey {
  std::uint64_t master_seed = 0;
  std::uint32_t level = 0;     // < 256
  std::uint64_t replica = 0;   // < 2^48
  StreamRole role = StreamRole::Estimator;

  friend bool operator==(const NoiseStreamKey&, const NoiseStreamKey&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for repetition r of an experiment with the given master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t repetition) noexcept;

simd::PhiloxKey philox_key(const NoiseStreamKey& key) noexcept;
/// Counter words 1..3 for fine step `step`. Throws UsageError when level or
/// replica exceed their fields.
simd::CounterTail counter_tail(const NoiseStreamKey& key, std::uint32_t step);

/// Variance of the scheme's increment for one mode over a step dt:
/// q (1 - e^{-2 lambda dt}) / (2 lambda) for ExpEuler, q e^{-2 lambda dt} dt otherwise.
double increment_variance(SchemeKind scheme, double lambda, double q, double dt);

/// Fine increments of one mode over two consecutive fine steps 2j and 2j+1.
struct FineIncrementPair {
  SchemeKind scheme = SchemeKind::ExpEuler;
  double dt = 0.0;
  std::complex<double> first;
  std::complex<double> second;
};

/// Increments of mode n for fine steps 2j, 2j+1 under the exponential Euler law.
/// Mode 0 is real with the full variance; for n != 0 the real and imaginary parts
/// are independent with half the variance each, and mode -n is the conjugate.
FineIncrementPair sample_ou_increment(std::ptrdiff_t n, double dt, const ModelSpec& m,
                                      const NoiseStreamKey& key, std::uint32_t coarse_step);
/// Same for the scaled Brownian increment sqrt(q) e^{-lambda dt} dW of the
/// drift-exponential and Milstein schemes.
FineIncrementPair sample_brownian_increment(std::ptrdiff_t n, double dt, const ModelSpec& m,
                                            const NoiseStreamKey& key, std::uint32_t coarse_step);

/// Coarse increment over [t_{2j}, t_{2j+2}] derived from the fine pair:
/// ExpEuler  e^{-lambda dt} first + second,
/// others    e^{-lambda dt} (first + second).
/// Throws UsageError when scheme or dt disagree with how the pair was generated.
std::complex<double> couple_coarse(const FineIncrementPair& fine, std::ptrdiff_t n, double dt,
                                   SchemeKind scheme, const ModelSpec& m);

/// Vectorised increment generation for all modes of an N-mode band.
///
/// Produces increments in the interleaved dof layout of SpectralField. The
/// Nyquist slot receives the real part of the draw for mode N/2 with variance
/// q/2, which is what a 2N-mode field sees in the real part of its mode N/2; this
/// keeps restricted fine increments and directly drawn coarse ones consistent.
class IncrementGenerator {
 public:
  IncrementGenerator(const ModelSpec& m, SchemeKind scheme, std::size_t n_modes, double dt);

  SchemeKind scheme() const noexcept { return scheme_; }
  std::size_t n_modes() const noexcept { return n_modes_; }
  double dt() const noexcept { return dt_; }

  /// Increment of fine step `step`; out has n_modes + 2 entries.
  void generate(const NoiseStreamKey& key, std::uint32_t step, std::span<double> out,
                OpCounter* ops = nullptr);

  /// Per-dof standard deviation and e^{-lambda dt}.
  std::span<const double> stddev() const noexcept { return stddev_; }
  std::span<const double> decay() const noexcept { return decay_; }

 private:
  SchemeKind scheme_;
  std::size_t n_modes_;
  double dt_;
  std::vector<double> stddev_;
  std::vector<double> decay_;
  std::vector<double> normals_;
};

/// Derives the coarse increment (first n_coarse + 2 dofs) from two consecutive fine
/// increments using the scheme's coupling rule. `decay` holds e^{-lambda dt_fine}
/// on the coarse band.
void couple_increments(SchemeKind scheme, std::span<const double> decay,
                       std::span<const double> fine_first, std::span<const double> fine_second,
                       std::span<double> coarse, OpCounter* ops = nullptr);

/// Per-dof value of a mode map, laid out like SpectralField::dofs(). Imaginary
/// slots of mode 0 and the Nyquist mode get `real_only_imag`.
std::vector<double> dof_profile(std::size_t n_modes, double real_only_imag,
                                const std::function<double(std::ptrdiff_t)>& value);

}  // namespace spde
