#include "rdeq/grid.hpp"

#include <stdexcept>

namespace rdeq {

void GridSpec2D::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw std::invalid_argument("grid window must have positive extent");
  }
  if (nx < 2 || ny < 2) {
    throw std::invalid_argument("grid needs at least 2 cells per axis");
  }
}

DensityGrid2D::DensityGrid2D(GridSpec2D spec, bool normalized)
    : spec_(spec), values_(spec.nx * spec.ny, 0.0), normalized_(normalized) {
  spec_.validate();
}

DensityGrid2D::DensityGrid2D(GridSpec2D spec, std::vector<double> values, bool normalized)
    : spec_(spec), values_(std::move(values)), normalized_(normalized) {
  spec_.validate();
  if (values_.size() != spec_.nx * spec_.ny) {
    throw std::invalid_argument("value count does not match grid dimensions");
  }
}

double DensityGrid2D::riemann_mass() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * spec_.cell_area();
}

double DensityGrid2D::max_value() const {
  double best = 0.0;
  for (double v : values_) {
    if (v > best) best = v;
  }
  return best;
}

std::pair<std::size_t, std::size_t> DensityGrid2D::argmax_cell() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i] > values_[best]) best = i;
  }
  return {best % spec_.nx, best / spec_.nx};
}

}  // namespace rdeq
