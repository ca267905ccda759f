#pragma once

// Constants shared by the scalar and AVX2 kernels. Both variants must evaluate the
// same expressions in the same order for their outputs to agree bit for bit.

#include <cstdint>

namespace spde::simd::detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;
inline constexpr int kPhiloxRounds = 10;

inline constexpr double kTwoPow52 = 4503599627370496.0;   // 2^52
inline constexpr double kTwoPowM52 = 1.0 / kTwoPow52;
inline constexpr std::uint64_t kMagic52 = 0x4330000000000000ull;  // bit pattern of 2^52

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;  // trailing zeros: e * kLn2Hi is exact
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kHalfPi = 1.57079632679489661923;

// log(m) = 2 f (1 + f^2/3 + f^4/5 + ...), f = (m - 1)/(m + 1), |f| <= 0.1716.
inline constexpr int kLogTerms = 12;
inline constexpr double kLogCoeff[kLogTerms] = {
    1.0,        1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,  1.0 / 11.0,
    1.0 / 13.0, 1.0 / 15.0, 1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0, 1.0 / 23.0};

// Taylor coefficients on |x| <= pi/4; the first omitted terms are below 1e-19.
inline constexpr int kSinTerms = 9;   // x^1 .. x^17
inline constexpr double kSinCoeff[kSinTerms] = {
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
    1.0 / 355687428096000.0};
inline constexpr int kCosTerms = 10;  // x^0 .. x^18
inline constexpr double kCosCoeff[kCosTerms] = {
    1.0,
    -1.0 / 2.0,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40320.0,
    -1.0 / 3628800.0,
    1.0 / 479001600.0,
    -1.0 / 87178291200.0,
    1.0 / 20922789888000.0,
    -1.0 / 6402373705728000.0};

}  // namespace spde::simd::detail
