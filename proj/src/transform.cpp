#include "spde/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <string>

#include "spde/error.hpp"

namespace spde {

namespace {
// The FFTW planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

GridTransform::GridTransform(std::size_t n) : n_(n) {
  require_power_of_two(n, "transform length");
  real_ = fftw_alloc_real(n);
  spec_ = fftw_alloc_complex(n / 2 + 1);
  if (!real_ || !spec_) {
    release();
    throw std::bad_alloc();
  }
  auto* spec = static_cast<fftw_complex*>(spec_);
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, spec, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, real_, FFTW_ESTIMATE);
  if (!forward_ || !backward_) {
    release();
    throw Error("FFTW could not plan a transform of length " + std::to_string(n));
  }
}

GridTransform::~GridTransform() { release(); }

GridTransform::GridTransform(GridTransform&& other) noexcept
    : n_(other.n_),
      forward_(other.forward_),
      backward_(other.backward_),
      real_(other.real_),
      spec_(other.spec_) {
  other.n_ = 0;
  other.forward_ = other.backward_ = nullptr;
  other.real_ = nullptr;
  other.spec_ = nullptr;
}

GridTransform& GridTransform::operator=(GridTransform&& other) noexcept {
  if (this != &other) {
    release();
    n_ = other.n_;
    forward_ = other.forward_;
    backward_ = other.backward_;
    real_ = other.real_;
    spec_ = other.spec_;
    other.n_ = 0;
    other.forward_ = other.backward_ = nullptr;
    other.real_ = nullptr;
    other.spec_ = nullptr;
  }
  return *this;
}

void GridTransform::release() noexcept {
  if (forward_ || backward_) {
    std::lock_guard lock(planner_mutex());
    if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  }
  forward_ = backward_ = nullptr;
  if (real_) fftw_free(real_);
  if (spec_) fftw_free(spec_);
  real_ = nullptr;
  spec_ = nullptr;
}

std::span<double> GridTransform::grid_buffer() noexcept { return {real_, n_}; }

std::span<double> GridTransform::to_grid_buffer(const SpectralField& v) {
  if (v.n_modes() != n_)
    throw UsageError("field has " + std::to_string(v.n_modes()) + " modes, transform expects " +
                     std::to_string(n_));
  // c2r overwrites its input, so the coefficients go through the owned buffer.
  const auto c = v.stored();
  auto* spec = static_cast<fftw_complex*>(spec_);
  for (std::size_t k = 0; k < c.size(); ++k) {
    spec[k][0] = c[k].real();
    spec[k][1] = c[k].imag();
  }
  spec[0][1] = 0.0;
  spec[n_ / 2][1] = 0.0;
  fftw_execute(static_cast<fftw_plan>(backward_));
  return grid_buffer();
}

void GridTransform::from_grid_buffer(SpectralField& out) {
  if (out.n_modes() != n_) out = SpectralField(n_);
  fftw_execute(static_cast<fftw_plan>(forward_));
  const auto* spec = static_cast<const fftw_complex*>(spec_);
  const double inv = 1.0 / static_cast<double>(n_);
  auto c = out.stored();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = {spec[k][0] * inv, spec[k][1] * inv};
  out.canonicalize();
}

void GridTransform::to_grid(const SpectralField& v, std::span<double> grid) {
  if (grid.size() != n_) throw UsageError("grid length does not match transform length");
  const auto buf = to_grid_buffer(v);
  std::copy(buf.begin(), buf.end(), grid.begin());
}

void GridTransform::from_grid(std::span<const double> grid, SpectralField& out) {
  if (grid.size() != n_) throw UsageError("grid length does not match transform length");
  std::copy(grid.begin(), grid.end(), real_);
  from_grid_buffer(out);
}

std::vector<double> to_grid(const SpectralField& v) {
  GridTransform t(v.n_modes());
  std::vector<double> grid(v.n_modes());
  t.to_grid(v, grid);
  return grid;
}

SpectralField from_grid(std::span<const double> grid) {
  GridTransform t(grid.size());
  SpectralField out(grid.size());
  t.from_grid(grid, out);
  return out;
}

}  // namespace spde
