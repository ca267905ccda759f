// AVX2 variants. Every expression mirrors scalar.cpp operation for operation; the
// file is compiled with -mavx2 but without -mfma so nothing gets contracted.

#include <immintrin.h>

#include "constants.hpp"
#include "spde/simd/kernels.hpp"

namespace spde::simd {
namespace detail {
const KernelTable& avx2_table() noexcept;
}

using namespace detail;

namespace {

inline __m256d u64_to_pd(__m256i v) noexcept {  // exact for v < 2^52
  const __m256i magic = _mm256_set1_epi64x(static_cast<long long>(kMagic52));
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, magic)), _mm256_set1_pd(kTwoPow52));
}

inline __m256d horner(const double* coeff, int terms, __m256d x) noexcept {
  __m256d p = _mm256_set1_pd(coeff[terms - 1]);
  for (int k = terms - 2; k >= 0; --k)
    p = _mm256_add_pd(_mm256_mul_pd(p, x), _mm256_set1_pd(coeff[k]));
  return p;
}

inline __m256d log_pd(__m256d x) noexcept {
  const __m256i bits = _mm256_castpd_si256(x);
  __m256d e = _mm256_sub_pd(u64_to_pd(_mm256_srli_epi64(bits, 52)), _mm256_set1_pd(1023.0));
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                      _mm256_set1_epi64x(0x3FF0000000000000ll)));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d p = horner(kLogCoeff, kLogTerms, _mm256_mul_pd(f, f));
  const __m256d logm = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), f), p);
  return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Hi)),
                       _mm256_add_pd(logm, _mm256_mul_pd(e, _mm256_set1_pd(kLn2Lo))));
}

inline void sincos_turns_pd(__m256d t, __m256d& s, __m256d& c) noexcept {
  const __m256d w = _mm256_mul_pd(_mm256_set1_pd(4.0), t);
  const __m256d k = _mm256_round_pd(w, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d x = _mm256_mul_pd(_mm256_sub_pd(w, k), _mm256_set1_pd(kHalfPi));
  const __m256d x2 = _mm256_mul_pd(x, x);
  const __m256d sx = _mm256_mul_pd(x, horner(kSinCoeff, kSinTerms, x2));
  const __m256d cx = horner(kCosCoeff, kCosTerms, x2);

  // k in {0..4}; adding 2^52 puts the integer in the low mantissa bits.
  const __m256i ki = _mm256_castpd_si256(_mm256_add_pd(k, _mm256_set1_pd(kTwoPow52)));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(ki, one), one));
  const __m256d neg_s = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(ki, two), two));
  const __m256d neg_c = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(ki, one), two), two));
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d rs = _mm256_blendv_pd(sx, cx, swap);
  const __m256d rc = _mm256_blendv_pd(cx, sx, swap);
  s = _mm256_xor_pd(rs, _mm256_and_pd(neg_s, sign));
  c = _mm256_xor_pd(rc, _mm256_and_pd(neg_c, sign));
}

void normal_pairs_avx2(PhiloxKey key, CounterTail tail, std::uint32_t first,
                       std::span<double> out) {
  const std::size_t count = out.size() / 2;
  const __m256i mask32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i m0 = _mm256_set1_epi64x(kPhiloxM0);
  const __m256i m1 = _mm256_set1_epi64x(kPhiloxM1);
  const __m256i w0 = _mm256_set1_epi64x(kPhiloxW0);
  const __m256i w1 = _mm256_set1_epi64x(kPhiloxW1);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const auto base = first + static_cast<std::uint32_t>(i);
    __m256i c0 = _mm256_set_epi64x(static_cast<std::uint32_t>(base + 3),
                                   static_cast<std::uint32_t>(base + 2),
                                   static_cast<std::uint32_t>(base + 1), base);
    __m256i c1 = _mm256_set1_epi64x(tail.c1);
    __m256i c2 = _mm256_set1_epi64x(tail.c2);
    __m256i c3 = _mm256_set1_epi64x(tail.c3);
    __m256i k0 = _mm256_set1_epi64x(key[0]);
    __m256i k1 = _mm256_set1_epi64x(key[1]);
    for (int round = 0; round < kPhiloxRounds; ++round) {
      if (round > 0) {
        k0 = _mm256_and_si256(_mm256_add_epi64(k0, w0), mask32);
        k1 = _mm256_and_si256(_mm256_add_epi64(k1, w1), mask32);
      }
      const __m256i p0 = _mm256_mul_epu32(c0, m0);
      const __m256i p1 = _mm256_mul_epu32(c2, m1);
      const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c1), k0);
      const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c3), k1);
      c1 = _mm256_and_si256(p1, mask32);
      c3 = _mm256_and_si256(p0, mask32);
      c0 = n0;
      c2 = n2;
    }
    const __m256i b1 = _mm256_srli_epi64(_mm256_or_si256(_mm256_slli_epi64(c1, 32), c0), 12);
    const __m256i b2 = _mm256_srli_epi64(_mm256_or_si256(_mm256_slli_epi64(c3, 32), c2), 12);
    const __m256d scale = _mm256_set1_pd(kTwoPowM52);
    const __m256d u1 = _mm256_mul_pd(_mm256_add_pd(u64_to_pd(b1), _mm256_set1_pd(0.5)), scale);
    const __m256d u2 = _mm256_mul_pd(u64_to_pd(b2), scale);

    const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(-2.0), log_pd(u1)));
    __m256d s;
    __m256d c;
    sincos_turns_pd(u2, s, c);
    const __m256d re = _mm256_mul_pd(r, c);
    const __m256d im = _mm256_mul_pd(r, s);
    const __m256d lo = _mm256_unpacklo_pd(re, im);  // re0 im0 re2 im2
    const __m256d hi = _mm256_unpackhi_pd(re, im);  // re1 im1 re3 im3
    _mm256_storeu_pd(out.data() + 2 * i, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(out.data() + 2 * i + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
  }
  if (i < count)
    scalar_kernels().normal_pairs(key, tail, first + static_cast<std::uint32_t>(i),
                                  out.subspan(2 * i));
}

void scale_avx2(std::span<const double> s, std::span<const double> z, std::span<double> out) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(&out[i], _mm256_mul_pd(_mm256_loadu_pd(&s[i]), _mm256_loadu_pd(&z[i])));
  for (; i < n; ++i) out[i] = s[i] * z[i];
}

void exp_update_avx2(std::span<double> v, std::span<const double> a, std::span<const double> b,
                     std::span<const double> f, std::span<const double> r) {
  const std::size_t n = v.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d av = _mm256_mul_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&v[i]));
    const __m256d bf = _mm256_mul_pd(_mm256_loadu_pd(&b[i]), _mm256_loadu_pd(&f[i]));
    _mm256_storeu_pd(&v[i], _mm256_add_pd(_mm256_add_pd(av, bf), _mm256_loadu_pd(&r[i])));
  }
  for (; i < n; ++i) v[i] = (a[i] * v[i] + b[i] * f[i]) + r[i];
}

void decay_update_avx2(std::span<double> v, std::span<const double> a,
                       std::span<const double> r) {
  const std::size_t n = v.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d av = _mm256_mul_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&v[i]));
    _mm256_storeu_pd(&v[i], _mm256_add_pd(av, _mm256_loadu_pd(&r[i])));
  }
  for (; i < n; ++i) v[i] = a[i] * v[i] + r[i];
}

void milstein_update_avx2(std::span<double> v, std::span<const double> a, double dt,
                          std::span<const double> f, std::span<const double> r) {
  const std::size_t n = v.size();
  const __m256d dtv = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d inner =
        _mm256_add_pd(_mm256_loadu_pd(&v[i]), _mm256_mul_pd(dtv, _mm256_loadu_pd(&f[i])));
    _mm256_storeu_pd(&v[i], _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(&a[i]), inner),
                                          _mm256_loadu_pd(&r[i])));
  }
  for (; i < n; ++i) v[i] = a[i] * (v[i] + dt * f[i]) + r[i];
}

void couple_weighted_avx2(std::span<const double> a, std::span<const double> r1,
                          std::span<const double> r2, std::span<double> out) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ar = _mm256_mul_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&r1[i]));
    _mm256_storeu_pd(&out[i], _mm256_add_pd(ar, _mm256_loadu_pd(&r2[i])));
  }
  for (; i < n; ++i) out[i] = a[i] * r1[i] + r2[i];
}

void couple_summed_avx2(std::span<const double> a, std::span<const double> r1,
                        std::span<const double> r2, std::span<double> out) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d sum = _mm256_add_pd(_mm256_loadu_pd(&r1[i]), _mm256_loadu_pd(&r2[i]));
    _mm256_storeu_pd(&out[i], _mm256_mul_pd(_mm256_loadu_pd(&a[i]), sum));
  }
  for (; i < n; ++i) out[i] = a[i] * (r1[i] + r2[i]);
}

}  // namespace

namespace detail {
const KernelTable& avx2_table() noexcept {
  static const KernelTable table{Isa::Avx2,
                                 normal_pairs_avx2,
                                 scale_avx2,
                                 exp_update_avx2,
                                 decay_update_avx2,
                                 milstein_update_avx2,
                                 couple_weighted_avx2,
                                 couple_summed_avx2};
  return table;
}
}  // namespace detail

}  // namespace spde::simd
