#pragma once

#include <span>
#include <vector>

#include "rdeq/grid.hpp"
#include "rdeq/sampling.hpp"

namespace rdeq {

/// A random equation system M(x; A) = B: deterministic residual map from a
/// point of dimension D and a parameter vector of dimension K to R residual
/// components. Implementations may freeze extra context (for instance the
/// state-space location when the unknown is an eigenvalue candidate).
class ResidualSystem {
 public:
  virtual ~ResidualSystem() = default;
  virtual std::size_t point_dim() const = 0;
  virtual std::size_t param_dim() const = 0;
  virtual std::size_t residual_dim() const = 0;
  virtual void eval(std::span<const double> point, std::span<const double> params,
                    std::span<double> out) const = 0;
};

/// Standard deviations of the zero-mean Gaussian noise vector B (or C), one
/// per residual component.
struct NoiseSpec {
  std::vector<double> stds;

  void validate() const;
  /// prod_r 1/(stds[r] * sqrt(2 pi)): the value of the noise density product
  /// at zero residual.
  double density_at_zero() const;
};

/// Monte Carlo estimate of the unnormalized solution density of
/// M(x; A) = B over a 2-D grid:
///
///   value(x) = (1/N) sum_n prod_r f_{B_r}(M_r(x; s_n))
///
/// evaluated at cell centers. Per-cell sums are accumulated exactly, so the
/// output is bit-identical under sample-row permutation and any thread
/// count. Throws EvaluationError when a residual is non-finite, naming the
/// cell and the sample row.
DensityGrid2D posterior_unnormalized(const ResidualSystem& system, const SampleMatrix& samples,
                                     const NoiseSpec& noise, const GridSpec2D& grid,
                                     int threads = 0);

/// Scales a grid so its Riemann sum is 1. Rejects grids whose total mass is
/// at or below mass_floor with DegeneratePosteriorError. A grid already
/// flagged normalized is returned unchanged, which makes normalization
/// exactly idempotent.
DensityGrid2D normalize(const DensityGrid2D& g, double mass_floor = 1e-300);

}  // namespace rdeq
