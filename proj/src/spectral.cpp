#include "spde/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "spde/error.hpp"
#include "spde/model.hpp"

namespace spde {

bool is_power_of_two(std::size_t n) noexcept { return std::has_single_bit(n); }

std::size_t next_power_of_two(std::size_t n) noexcept { return n <= 1 ? 1 : std::bit_ceil(n); }

void require_power_of_two(std::size_t n, const char* what) {
  if (n < 2 || !is_power_of_two(n))
    throw ConfigError(std::string(what) + " must be a power of two >= 2, got " + std::to_string(n));
}

SpectralField::SpectralField(std::size_t n_modes) : n_modes_(n_modes) {
  require_power_of_two(n_modes, "mode count");
  coeffs_.assign(n_modes / 2 + 1, {0.0, 0.0});
}

std::complex<double> SpectralField::mode(std::ptrdiff_t n) const {
  const auto half = static_cast<std::ptrdiff_t>(n_modes_ / 2);
  if (n < -half || n >= half)
    throw ResolutionError("mode " + std::to_string(n) + " outside band of " +
                          std::to_string(n_modes_) + " modes");
  if (n == -half) return coeffs_[static_cast<std::size_t>(half)];
  if (n >= 0) return coeffs_[static_cast<std::size_t>(n)];
  return std::conj(coeffs_[static_cast<std::size_t>(-n)]);
}

void SpectralField::set_mode(std::ptrdiff_t n, std::complex<double> value) {
  const auto half = static_cast<std::ptrdiff_t>(n_modes_ / 2);
  if (n < -half || n >= half)
    throw ResolutionError("mode " + std::to_string(n) + " outside band of " +
                          std::to_string(n_modes_) + " modes");
  if (n == -half) {
    coeffs_[static_cast<std::size_t>(half)] = {value.real(), 0.0};
  } else if (n == 0) {
    coeffs_[0] = {value.real(), 0.0};
  } else if (n > 0) {
    coeffs_[static_cast<std::size_t>(n)] = value;
  } else {
    coeffs_[static_cast<std::size_t>(-n)] = std::conj(value);
  }
}

std::span<double> SpectralField::dofs() noexcept {
  return {reinterpret_cast<double*>(coeffs_.data()), 2 * coeffs_.size()};
}

std::span<const double> SpectralField::dofs() const noexcept {
  return {reinterpret_cast<const double*>(coeffs_.data()), 2 * coeffs_.size()};
}

void SpectralField::canonicalize() noexcept {
  if (coeffs_.empty()) return;
  coeffs_.front().imag(0.0);
  coeffs_.back().imag(0.0);
}

void SpectralField::set_zero() noexcept { std::fill(coeffs_.begin(), coeffs_.end(), 0.0); }

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.n_modes_ != n_modes_) throw UsageError("adding fields of different mode counts");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (other.n_modes_ != n_modes_) throw UsageError("subtracting fields of different mode counts");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField project(const SpectralField& v, std::size_t n_modes) {
  require_power_of_two(n_modes, "projection size");
  if (n_modes > v.n_modes())
    throw ResolutionError("cannot project " + std::to_string(v.n_modes()) + " modes onto " +
                          std::to_string(n_modes));
  if (n_modes == v.n_modes()) return v;
  SpectralField out(n_modes);
  const auto src = v.stored();
  auto dst = out.stored();
  const std::size_t half = n_modes / 2;
  std::copy_n(src.begin(), half, dst.begin());
  dst[half] = {src[half].real(), 0.0};
  return out;
}

SpectralField pad(const SpectralField& v, std::size_t n_modes) {
  require_power_of_two(n_modes, "padding size");
  if (n_modes < v.n_modes())
    throw ResolutionError("cannot pad " + std::to_string(v.n_modes()) + " modes to " +
                          std::to_string(n_modes));
  if (n_modes == v.n_modes()) return v;
  SpectralField out(n_modes);
  const auto src = v.stored();
  std::copy(src.begin(), src.end(), out.stored().begin());
  return out;
}

double h_norm(const SpectralField& v) {
  const auto c = v.stored();
  if (c.empty()) return 0.0;
  const std::size_t half = c.size() - 1;
  double sum = std::norm(c[0]) + std::norm(c[half]);
  for (std::size_t k = 1; k < half; ++k) sum += 2.0 * std::norm(c[k]);
  return std::sqrt(sum);
}

double h_norm(const SpectralField& v, InterpolationWeight w, const ModelSpec& model) {
  const auto c = v.stored();
  if (c.empty()) return 0.0;
  const std::size_t half = c.size() - 1;
  auto weight = [&](std::ptrdiff_t n) { return std::pow(model.lambda(n), 2.0 * w.r); };
  double sum = weight(0) * std::norm(c[0]) +
               weight(static_cast<std::ptrdiff_t>(half)) * std::norm(c[half]);
  for (std::size_t k = 1; k < half; ++k)
    sum += 2.0 * weight(static_cast<std::ptrdiff_t>(k)) * std::norm(c[k]);
  return std::sqrt(sum);
}

double triangular_wave_mode(std::ptrdiff_t n) noexcept {
  if (n == 0) return 0.5;
  if (n % 2 == 0) return 0.0;
  const double nn = static_cast<double>(n);
  return -2.0 / (std::numbers::pi * std::numbers::pi * nn * nn);
}

SpectralField triangular_wave_coefficients(std::size_t n_modes) {
  SpectralField out(n_modes);
  const auto half = static_cast<std::ptrdiff_t>(n_modes / 2);
  for (std::ptrdiff_t n = -half; n < half; ++n)
    if (n >= 0 || n == -half) out.set_mode(n, triangular_wave_mode(n));
  return out;
}

}  // namespace spde
