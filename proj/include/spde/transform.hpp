#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spde/spectral.hpp"

namespace spde {

/// Grid <-> coefficient transform pair of length N.
///
///   to_grid:   g_k = sum_n c_n exp(i 2 pi n k / N),   k = 0..N-1
///   from_grid: c_n = (1/N) sum_k g_k exp(-i 2 pi n k / N)
///
/// Owns its scratch buffers; a GridTransform must not be used from two threads
/// at once, but any number of instances may run concurrently.
class GridTransform {
 public:
  explicit GridTransform(std::size_t n);
  ~GridTransform();
  GridTransform(const GridTransform&) = delete;
  GridTransform& operator=(const GridTransform&) = delete;
  GridTransform(GridTransform&& other) noexcept;
  GridTransform& operator=(GridTransform&& other) noexcept;

  std::size_t size() const noexcept { return n_; }

  void to_grid(const SpectralField& v, std::span<double> grid);
  void from_grid(std::span<const double> grid, SpectralField& out);

  /// Direct access to the real-space buffer, for in-place pointwise maps.
  std::span<double> grid_buffer() noexcept;
  /// to_grid into grid_buffer().
  std::span<double> to_grid_buffer(const SpectralField& v);
  /// from_grid reading grid_buffer().
  void from_grid_buffer(SpectralField& out);

 private:
  void release() noexcept;

  std::size_t n_ = 0;
  void* forward_ = nullptr;   // fftw_plan, r2c
  void* backward_ = nullptr;  // fftw_plan, c2r
  double* real_ = nullptr;
  void* spec_ = nullptr;      // fftw_complex[n/2 + 1]
};

std::vector<double> to_grid(const SpectralField& v);
SpectralField from_grid(std::span<const double> grid);

}  // namespace spde
