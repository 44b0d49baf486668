#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdeq/grid.hpp"
#include "rdeq/model_rm.hpp"
#include "rdeq/randeq.hpp"
#include "rdeq/sampling.hpp"

namespace rdeq {

/// Grid of stability probabilities kappa(x) in [0,1].
struct KappaGrid {
  GridSpec2D spec;
  std::vector<double> values;  // row-major, same layout as DensityGrid2D

  double at(std::size_t ix, std::size_t iy) const { return values[iy * spec.nx + ix]; }
  DensityGrid2D as_grid() const { return {spec, values, false}; }
};

/// A state-space location at which the eigenvalue density is probed.
struct ProbePoint {
  Vec2 location;
  std::string label;
};

enum class KappaMethod { grid, direct };

/// Normalized posterior density of the Jacobian eigenvalues at a location,
/// over the sigma window. On windows symmetric about sigma2 = 0 the result
/// is exactly symmetric under sigma2 -> -sigma2. Throws
/// DegeneratePosteriorError when no eigenvalue mass lies in the window.
DensityGrid2D eig_posterior(Vec2 location, const SampleMatrix& samples,
                            const NoiseSpec& noise, const GridSpec2D& sigma_grid,
                            int threads = 0);

/// Probability mass of a normalized eigenvalue density in the half plane
/// sigma1 < 0, by Riemann sum over cells whose center has sigma1 < 0.
/// Throws ContractError on unnormalized input.
double kappa_from_grid(const DensityGrid2D& eig_density);

/// Fraction of sampled Jacobian eigenvalues with negative real part
/// (2 eigenvalues per sample row). Order-exact: invariant under sample
/// permutation.
double kappa_direct(Vec2 location, const SampleMatrix& samples);

/// Sigma window covering every eigenvalue of every sample row at the given
/// location, padded by 20x the widest noise std. The sigma2 axis is
/// symmetric with an odd cell count so sigma2 = 0 is a center row; when the
/// sigma1 range straddles zero, a cell edge is placed exactly at sigma1 = 0
/// so the half-plane split never cuts through a cell.
GridSpec2D eigenvalue_window(Vec2 location, const SampleMatrix& samples,
                             const NoiseSpec& noise);

/// Per-cell kappa over a state-space region. method = grid evaluates the
/// full eigenvalue posterior per cell (sigma window from `sigma_grid` when
/// given, otherwise adaptive per cell); method = direct counts eigenvalue
/// signs. Both are deterministic given the samples.
KappaGrid kappa_map(const GridSpec2D& region, const SampleMatrix& samples,
                    KappaMethod method, const NoiseSpec& noise,
                    const std::optional<GridSpec2D>& sigma_grid = std::nullopt,
                    int threads = 0);

}  // namespace rdeq
