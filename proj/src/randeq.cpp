#include "rdeq/randeq.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rdeq/errors.hpp"
#include "rdeq/exact_sum.hpp"
#include "rdeq/parallel.hpp"

namespace rdeq {

namespace {

// exp(-q) for q beyond this is at most ~5e-324; contributions are dropped
// before the exp call.
constexpr double kExpCutoff = 745.0;

}  // namespace

void NoiseSpec::validate() const {
  if (stds.empty()) throw std::invalid_argument("noise spec needs at least one std");
  for (double s : stds) {
    if (!(s > 0.0)) throw std::invalid_argument("noise stds must be positive");
  }
}

double NoiseSpec::density_at_zero() const {
  double c = 1.0;
  for (double s : stds) c *= 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
  return c;
}

DensityGrid2D posterior_unnormalized(const ResidualSystem& system, const SampleMatrix& samples,
                                     const NoiseSpec& noise, const GridSpec2D& grid,
                                     int threads) {
  grid.validate();
  noise.validate();
  if (system.point_dim() != 2) {
    throw ContractError("posterior evaluation requires a residual system with D = 2");
  }
  if (samples.cols() != system.param_dim()) {
    throw ContractError("sample columns (" + std::to_string(samples.cols()) +
                        ") do not match the system parameter dimension (" +
                        std::to_string(system.param_dim()) + ")");
  }
  const std::size_t r_dim = system.residual_dim();
  if (noise.stds.size() != r_dim) {
    throw ContractError("noise stds (" + std::to_string(noise.stds.size()) +
                        ") do not match the residual dimension (" + std::to_string(r_dim) +
                        ")");
  }

  std::vector<double> inv_two_var(r_dim);
  for (std::size_t r = 0; r < r_dim; ++r) {
    inv_two_var[r] = 1.0 / (2.0 * noise.stds[r] * noise.stds[r]);
  }
  const double norm_const = noise.density_at_zero();
  const std::size_t n_samples = samples.rows();
  const double inv_n = 1.0 / static_cast<double>(n_samples);

  DensityGrid2D out(grid, false);
  std::span<double> cells = out.values();

  parallel_for_chunks(grid.nx * grid.ny, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> res(r_dim);
    double point[2];
    for (std::size_t cell = begin; cell < end; ++cell) {
      const std::size_t ix = cell % grid.nx;
      const std::size_t iy = cell / grid.nx;
      point[0] = grid.x_center(ix);
      point[1] = grid.y_center(iy);
      ExactAccumulator acc;
      for (std::size_t n = 0; n < n_samples; ++n) {
        system.eval(point, samples.row(n), res);
        double q = 0.0;
        for (std::size_t r = 0; r < r_dim; ++r) {
          if (!std::isfinite(res[r])) {
            throw EvaluationError("non-finite residual at cell (" + std::to_string(ix) +
                                  ", " + std::to_string(iy) + "), sample row " +
                                  std::to_string(n));
          }
          q += res[r] * res[r] * inv_two_var[r];
        }
        if (q > kExpCutoff) continue;
        acc.add(norm_const * std::exp(-q));
      }
      cells[cell] = acc.to_double() * inv_n;
    }
  });
  return out;
}

DensityGrid2D normalize(const DensityGrid2D& g, double mass_floor) {
  if (g.normalized()) return g;
  const double mass = g.riemann_mass();
  if (!(mass > mass_floor)) {
    throw DegeneratePosteriorError("no solution mass on grid (total " +
                                   std::to_string(mass) + ")");
  }
  DensityGrid2D out(g.spec(), std::vector<double>(g.values().begin(), g.values().end()),
                    true);
  const double scale = 1.0 / mass;
  for (double& v : out.values()) v *= scale;
  return out;
}

}  // namespace rdeq
