#pragma once

// Data-parallel inner loops of the solvers.
//
// Every kernel has a scalar reference implementation and, where the build
// supports it, an AVX2 variant. The variants perform the same IEEE operations in
// the same order (no fused multiply-add), so their outputs are bit-identical;
// tests/test_kernels.cpp holds them to that. The active table is chosen once at
// runtime from the CPU features; SPDE_KERNELS=scalar|avx2 overrides the choice.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace spde::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

using PhiloxKey = std::array<std::uint32_t, 2>;
using PhiloxCounter = std::array<std::uint32_t, 4>;

/// Philox4x32-10 block function.
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// Counter words shared by a batch; word 0 is the per-item index.
struct CounterTail {
  std::uint32_t c1 = 0;
  std::uint32_t c2 = 0;
  std::uint32_t c3 = 0;
};

struct KernelTable {
  Isa isa;

  /// For i in [0, count): block = philox4x32({first + i, tail}, key) mapped through
  /// Box-Muller to two standard normals written to out[2i], out[2i+1].
  void (*normal_pairs)(PhiloxKey key, CounterTail tail, std::uint32_t first,
                       std::span<double> out);

  /// out = s * z
  void (*scale)(std::span<const double> s, std::span<const double> z, std::span<double> out);

  /// v = (a * v + b * f) + r
  void (*exp_update)(std::span<double> v, std::span<const double> a, std::span<const double> b,
                     std::span<const double> f, std::span<const double> r);

  /// v = a * v + r
  void (*decay_update)(std::span<double> v, std::span<const double> a, std::span<const double> r);

  /// v = a * (v + dt * f) + r
  void (*milstein_update)(std::span<double> v, std::span<const double> a, double dt,
                          std::span<const double> f, std::span<const double> r);

  /// out = a * r1 + r2
  void (*couple_weighted)(std::span<const double> a, std::span<const double> r1,
                          std::span<const double> r2, std::span<double> out);

  /// out = a * (r1 + r2)
  void (*couple_summed)(std::span<const double> a, std::span<const double> r1,
                        std::span<const double> r2, std::span<double> out);
};

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels() noexcept;
/// The table selected for this process.
const KernelTable& kernels() noexcept;

/// Scalar building blocks of normal_pairs, exposed for testing. The uniforms use
/// the top 52 bits of the 64-bit word hi:lo.
double uniform_open(std::uint32_t lo, std::uint32_t hi) noexcept;          // (0, 1)
double uniform_closed_open(std::uint32_t lo, std::uint32_t hi) noexcept;   // [0, 1)
double ref_log(double x) noexcept;
void ref_sincos_turns(double turns, double& s, double& c) noexcept;        // angle 2 pi turns

}  // namespace spde::simd
