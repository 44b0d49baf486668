#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rdeq {

/// Rectangular evaluation lattice. Values live at cell centers; the center
/// formula is symmetric about the window midpoint so that mirror-symmetric
/// windows produce bitwise mirror-symmetric center coordinates.
struct GridSpec2D {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  std::size_t nx = 2;
  std::size_t ny = 2;

  void validate() const;

  double dx() const { return (x_max - x_min) / static_cast<double>(nx); }
  double dy() const { return (y_max - y_min) / static_cast<double>(ny); }
  double cell_area() const { return dx() * dy(); }

  double x_center(std::size_t i) const {
    const double mid = 0.5 * (x_min + x_max);
    return mid + static_cast<double>(2 * static_cast<long long>(i) + 1 -
                                     static_cast<long long>(nx)) *
                     (0.5 * dx());
  }
  double y_center(std::size_t j) const {
    const double mid = 0.5 * (y_min + y_max);
    return mid + static_cast<double>(2 * static_cast<long long>(j) + 1 -
                                     static_cast<long long>(ny)) *
                     (0.5 * dy());
  }

  bool operator==(const GridSpec2D&) const = default;
};

/// Grid of non-negative values with a normalization flag. When the flag is
/// set, sum(values) * dx * dy == 1 within 1e-9.
class DensityGrid2D {
 public:
  DensityGrid2D(GridSpec2D spec, bool normalized = false);
  DensityGrid2D(GridSpec2D spec, std::vector<double> values, bool normalized);

  const GridSpec2D& spec() const { return spec_; }
  bool normalized() const { return normalized_; }
  void set_normalized(bool v) { normalized_ = v; }

  double at(std::size_t ix, std::size_t iy) const { return values_[iy * spec_.nx + ix]; }
  double& at(std::size_t ix, std::size_t iy) { return values_[iy * spec_.nx + ix]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double riemann_mass() const;
  double max_value() const;
  /// Cell indices of the maximum value (first in row-major order on ties).
  std::pair<std::size_t, std::size_t> argmax_cell() const;

 private:
  GridSpec2D spec_;
  std::vector<double> values_;
  bool normalized_ = false;
};

}  // namespace rdeq
