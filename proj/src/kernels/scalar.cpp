#include <bit>
#include <cmath>
#include <cstring>

#include "constants.hpp"
#include "spde/simd/kernels.hpp"

namespace spde::simd {

using namespace detail;

namespace {

inline std::uint32_t mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  return static_cast<std::uint32_t>(p);
}

inline std::uint64_t top52(std::uint32_t lo, std::uint32_t hi) noexcept {
  return ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
}

void normal_pairs_scalar(PhiloxKey key, CounterTail tail, std::uint32_t first,
                         std::span<double> out) {
  const std::size_t count = out.size() / 2;
  for (std::size_t i = 0; i < count; ++i) {
    const PhiloxCounter block =
        philox4x32({first + static_cast<std::uint32_t>(i), tail.c1, tail.c2, tail.c3}, key);
    const double u1 = uniform_open(block[0], block[1]);
    const double u2 = uniform_closed_open(block[2], block[3]);
    const double r = std::sqrt(-2.0 * ref_log(u1));
    double s = 0.0;
    double c = 0.0;
    ref_sincos_turns(u2, s, c);
    out[2 * i] = r * c;
    out[2 * i + 1] = r * s;
  }
}

void scale_scalar(std::span<const double> s, std::span<const double> z, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s[i] * z[i];
}

void exp_update_scalar(std::span<double> v, std::span<const double> a, std::span<const double> b,
                       std::span<const double> f, std::span<const double> r) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (a[i] * v[i] + b[i] * f[i]) + r[i];
}

void decay_update_scalar(std::span<double> v, std::span<const double> a,
                         std::span<const double> r) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * v[i] + r[i];
}

void milstein_update_scalar(std::span<double> v, std::span<const double> a, double dt,
                            std::span<const double> f, std::span<const double> r) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * (v[i] + dt * f[i]) + r[i];
}

void couple_weighted_scalar(std::span<const double> a, std::span<const double> r1,
                            std::span<const double> r2, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * r1[i] + r2[i];
}

void couple_summed_scalar(std::span<const double> a, std::span<const double> r1,
                          std::span<const double> r2, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * (r1[i] + r2[i]);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < kPhiloxRounds; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0 = 0;
    std::uint32_t hi1 = 0;
    const std::uint32_t lo0 = mulhilo(kPhiloxM0, ctr[0], hi0);
    const std::uint32_t lo1 = mulhilo(kPhiloxM1, ctr[2], hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

double uniform_open(std::uint32_t lo, std::uint32_t hi) noexcept {
  return (static_cast<double>(top52(lo, hi)) + 0.5) * kTwoPowM52;
}

double uniform_closed_open(std::uint32_t lo, std::uint32_t hi) noexcept {
  return static_cast<double>(top52(lo, hi)) * kTwoPowM52;
}

// Natural log for positive normal doubles: split off the binary exponent, fold the
// mantissa into [sqrt(2)/2, sqrt(2)] and sum the atanh series.
double ref_log(double x) noexcept {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const std::uint64_t biased = bits >> 52;
  double e = static_cast<double>(biased) - 1023.0;
  double m = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
  if (m > kSqrt2) {
    m = m * 0.5;
    e = e + 1.0;
  }
  const double f = (m - 1.0) / (m + 1.0);
  const double s = f * f;
  double p = kLogCoeff[kLogTerms - 1];
  for (int k = kLogTerms - 2; k >= 0; --k) p = p * s + kLogCoeff[k];
  const double logm = (2.0 * f) * p;
  return e * kLn2Hi + (logm + e * kLn2Lo);
}

void ref_sincos_turns(double turns, double& s, double& c) noexcept {
  const double w = 4.0 * turns;
  const double k = std::nearbyint(w);
  const double x = (w - k) * kHalfPi;
  const double x2 = x * x;

  double ps = kSinCoeff[kSinTerms - 1];
  for (int i = kSinTerms - 2; i >= 0; --i) ps = ps * x2 + kSinCoeff[i];
  double pc = kCosCoeff[kCosTerms - 1];
  for (int i = kCosTerms - 2; i >= 0; --i) pc = pc * x2 + kCosCoeff[i];
  const double sx = x * ps;
  const double cx = pc;

  const auto q = static_cast<std::int64_t>(k) & 3;
  double rs = (q & 1) ? cx : sx;
  double rc = (q & 1) ? sx : cx;
  if (q & 2) rs = -rs;
  if ((q + 1) & 2) rc = -rc;
  s = rs;
  c = rc;
}

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{Isa::Scalar,
                                 normal_pairs_scalar,
                                 scale_scalar,
                                 exp_update_scalar,
                                 decay_update_scalar,
                                 milstein_update_scalar,
                                 couple_weighted_scalar,
                                 couple_summed_scalar};
  return table;
}

}  // namespace spde::simd
