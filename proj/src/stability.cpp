#include "rdeq/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rdeq/errors.hpp"
#include "rdeq/parallel.hpp"

namespace rdeq {

namespace {

constexpr double kKappaTol = 1e-9;

double clamp_probability(double v) {
  if (v > 1.0 + kKappaTol || v < -kKappaTol) {
    throw ContractError("kappa outside [0,1] beyond tolerance: " + std::to_string(v));
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

DensityGrid2D eig_posterior(Vec2 location, const SampleMatrix& samples,
                            const NoiseSpec& noise, const GridSpec2D& sigma_grid,
                            int threads) {
  const RmEigSystem system(location);
  DensityGrid2D raw = posterior_unnormalized(system, samples, noise, sigma_grid, threads);
  try {
    return normalize(raw);
  } catch (const DegeneratePosteriorError&) {
    throw DegeneratePosteriorError("no eigenvalue mass in the sigma window at location (" +
                                   std::to_string(location[0]) + ", " +
                                   std::to_string(location[1]) + ")");
  }
}

double kappa_from_grid(const DensityGrid2D& eig_density) {
  if (!eig_density.normalized()) {
    throw ContractError("kappa integration requires a normalized eigenvalue density");
  }
  const GridSpec2D& spec = eig_density.spec();
  double sum = 0.0;
  for (std::size_t ix = 0; ix < spec.nx; ++ix) {
    if (!(spec.x_center(ix) < 0.0)) continue;  // centers at exactly 0 count as non-negative
    for (std::size_t iy = 0; iy < spec.ny; ++iy) {
      sum += eig_density.at(ix, iy);
    }
  }
  return clamp_probability(sum * spec.cell_area());
}

double kappa_direct(Vec2 location, const SampleMatrix& samples) {
  if (samples.cols() != 3) {
    throw ContractError("kappa_direct expects 3 parameter columns (k, m, c)");
  }
  const PopulationState state{location[0], location[1]};
  std::size_t negative = 0;
  for (std::size_t n = 0; n < samples.rows(); ++n) {
    const auto row = samples.row(n);
    const ComplexEigenPair eig =
        rm_eigenvalues(state, {row[0], row[1], row[2]});
    if (eig.lambda1.real() < 0.0) ++negative;
    if (eig.lambda2.real() < 0.0) ++negative;
  }
  return static_cast<double>(negative) / (2.0 * static_cast<double>(samples.rows()));
}

GridSpec2D eigenvalue_window(Vec2 location, const SampleMatrix& samples,
                             const NoiseSpec& noise) {
  if (samples.cols() != 3) {
    throw ContractError("eigenvalue window expects 3 parameter columns (k, m, c)");
  }
  noise.validate();
  const PopulationState state{location[0], location[1]};
  double min_re = std::numeric_limits<double>::infinity();
  double max_re = -std::numeric_limits<double>::infinity();
  double max_abs_im = 0.0;
  for (std::size_t n = 0; n < samples.rows(); ++n) {
    const auto row = samples.row(n);
    const ComplexEigenPair eig = rm_eigenvalues(state, {row[0], row[1], row[2]});
    for (const auto& lambda : {eig.lambda1, eig.lambda2}) {
      min_re = std::min(min_re, lambda.real());
      max_re = std::max(max_re, lambda.real());
      max_abs_im = std::max(max_abs_im, std::abs(lambda.imag()));
    }
  }
  const double w = *std::max_element(noise.stds.begin(), noise.stds.end());
  const double pad = 20.0 * w;
  const double lo = min_re - pad;
  const double hi = max_re + pad;
  const double half = max_abs_im + pad;
  const double span = std::max(hi - lo, 2.0 * half);
  // Cells at half the noise width resolve each eigenvalue bump; the count
  // cap keeps extreme windows affordable.
  const double delta = std::max(0.5 * w, span / 1500.0);

  GridSpec2D spec;
  if (lo < 0.0 && hi > 0.0) {
    const auto n_neg = static_cast<std::size_t>(std::ceil(-lo / delta));
    const auto n_pos = static_cast<std::size_t>(std::ceil(hi / delta));
    spec.nx = n_neg + n_pos;
    spec.x_min = -(static_cast<double>(n_neg) * delta);
    spec.x_max = static_cast<double>(n_pos) * delta;
  } else {
    spec.nx = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((hi - lo) / delta)));
    spec.x_min = lo;
    spec.x_max = lo + static_cast<double>(spec.nx) * delta;
  }
  const auto m_half =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(half / delta - 0.5)));
  spec.ny = 2 * m_half + 1;
  spec.y_max = (static_cast<double>(m_half) + 0.5) * delta;
  spec.y_min = -spec.y_max;
  spec.validate();
  return spec;
}

KappaGrid kappa_map(const GridSpec2D& region, const SampleMatrix& samples,
                    KappaMethod method, const NoiseSpec& noise,
                    const std::optional<GridSpec2D>& sigma_grid, int threads) {
  region.validate();
  KappaGrid out{region, std::vector<double>(region.nx * region.ny, 0.0)};

  parallel_for_chunks(region.nx * region.ny, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t cell = begin; cell < end; ++cell) {
      const Vec2 center = {region.x_center(cell % region.nx),
                           region.y_center(cell / region.nx)};
      if (method == KappaMethod::direct) {
        out.values[cell] = kappa_direct(center, samples);
      } else {
        const GridSpec2D window =
            sigma_grid ? *sigma_grid : eigenvalue_window(center, samples, noise);
        const DensityGrid2D density = eig_posterior(center, samples, noise, window, 1);
        out.values[cell] = kappa_from_grid(density);
      }
    }
  });
  return out;
}

}  // namespace rdeq
