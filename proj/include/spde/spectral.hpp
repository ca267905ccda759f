#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace spde {

class ModelSpec;

/// Truncated Fourier representation of a real-valued periodic function on [0,1).
///
/// A field with `n_modes() == N` (a power of two) represents
///
///     v(x) = sum_{n=-N/2}^{N/2-1} c_n exp(i 2 pi n x)
///
/// Only c_0 .. c_{N/2-1} and the Nyquist coefficient c_{-N/2} are stored; the
/// negative modes are implied by c_{-n} = conj(c_n).  Stored slot k < N/2 holds
/// c_k, stored slot N/2 holds c_{-N/2}.  Both c_0 and c_{-N/2} are real.
///
/// The storage is N/2 + 1 complex numbers, i.e. N real degrees of freedom, which
/// is the layout of a real-to-complex FFT of length N.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(std::size_t n_modes);

  std::size_t n_modes() const noexcept { return n_modes_; }
  std::size_t stored_size() const noexcept { return coeffs_.size(); }
  bool empty() const noexcept { return n_modes_ == 0; }

  /// Coefficient of exp(i 2 pi n x) for n in [-N/2, N/2 - 1].
  std::complex<double> mode(std::ptrdiff_t n) const;
  /// Sets c_n and its conjugate partner. For n = 0 and n = -N/2 the imaginary part is dropped.
  void set_mode(std::ptrdiff_t n, std::complex<double> value);

  std::span<const std::complex<double>> stored() const noexcept { return coeffs_; }
  std::span<std::complex<double>> stored() noexcept { return coeffs_; }

  /// Interleaved (re, im) view used by the vector kernels; length N + 2.
  std::span<double> dofs() noexcept;
  std::span<const double> dofs() const noexcept;

  /// Drops any imaginary part that crept into the two real slots.
  void canonicalize() noexcept;
  void set_zero() noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) noexcept;

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  std::size_t n_modes_ = 0;
  std::vector<std::complex<double>> coeffs_;
};

/// Weight exponent r of the (-A)^r interpolation norm.
struct InterpolationWeight {
  double r = 0.0;
};

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

/// Throws ConfigError unless n is a power of two >= 2.
void require_power_of_two(std::size_t n, const char* what);

/// Orthogonal projection onto the N-mode band (real Nyquist part retained).
SpectralField project(const SpectralField& v, std::size_t n_modes);

/// Embeds v into a larger band. The Nyquist coefficient of v is placed on both +-N_v/2,
/// so that project(pad(v, N), v.n_modes()) == v.
SpectralField pad(const SpectralField& v, std::size_t n_modes);

/// Plain H = L^2(0,1) norm.
double h_norm(const SpectralField& v);
/// sqrt(sum_n lambda_n^{2r} |c_n|^2) over the stored band.
double h_norm(const SpectralField& v, InterpolationWeight w, const ModelSpec& model);

/// P_N u_0 for the triangular wave u_0(x) = 2x on [0,1/2], 2(1-x) on (1/2,1].
SpectralField triangular_wave_coefficients(std::size_t n_modes);

/// Exact Fourier coefficient of the triangular wave for mode n.
double triangular_wave_mode(std::ptrdiff_t n) noexcept;

}  // namespace spde
