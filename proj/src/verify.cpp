#include "rdeq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rdeq/errors.hpp"
#include "rdeq/parallel.hpp"
#include "rdeq/randeq.hpp"

namespace rdeq {

namespace {

double max_norm(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

bool finite(const Vec2& v) { return std::isfinite(v[0]) && std::isfinite(v[1]); }

// Bin index of a point, or nullopt when it falls outside the window.
std::optional<std::size_t> bin_index(const GridSpec2D& grid, double x, double y) {
  if (!(x >= grid.x_min && x < grid.x_max && y >= grid.y_min && y < grid.y_max)) {
    return std::nullopt;
  }
  auto ix = static_cast<std::size_t>((x - grid.x_min) / grid.dx());
  auto iy = static_cast<std::size_t>((y - grid.y_min) / grid.dy());
  ix = std::min(ix, grid.nx - 1);
  iy = std::min(iy, grid.ny - 1);
  return iy * grid.nx + ix;
}

// Shared driver: solve each drawn parameter set, bin the successes, report
// the failures. `solve` returns the landed state or nullopt.
template <typename Solver>
HistogramResult histogram_from_solver(const ParameterLaw& law, std::size_t n,
                                      std::uint64_t seed, const GridSpec2D& grid,
                                      int threads, Solver&& solve) {
  grid.validate();
  if (n == 0) {
    throw DegeneratePosteriorError("verification histogram needs at least one draw");
  }
  const SampleMatrix draws = plain_sample(law, n, seed);

  std::vector<std::uint32_t> counts(grid.nx * grid.ny, 0);
  std::vector<std::optional<Vec2>> landed(n);
  parallel_for_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = draws.row(i);
      landed[i] = solve(RMParams{row[0], row[1], row[2]});
    }
  });

  HistogramResult result{DensityGrid2D(grid, false)};
  result.n_total = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!landed[i]) {
      ++result.n_failed;
      continue;
    }
    if (const auto bin = bin_index(grid, (*landed[i])[0], (*landed[i])[1])) {
      ++counts[*bin];
      ++result.n_binned;
    }
  }
  result.degenerate_warning = 2 * result.n_failed > n;

  DensityGrid2D raw(grid, false);
  auto values = raw.values();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    values[i] = static_cast<double>(counts[i]);
  }
  result.density = normalize(raw);
  return result;
}

}  // namespace

void NewtonConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("newton tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("newton max_iters must be >= 1");
  if (!(damping_min > 0.0 && damping_min <= 1.0)) {
    throw std::invalid_argument("newton damping_min must be in (0, 1]");
  }
}

void OdeConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("ode dt must be positive");
  if (!(dt < t_max)) throw std::invalid_argument("ode dt must be smaller than t_max");
  if (!(steady_tol > 0.0)) throw std::invalid_argument("ode steady_tol must be positive");
}

NewtonResult newton_solve(const RMParams& params, const NewtonConfig& cfg) {
  cfg.validate();
  NewtonResult result;
  Vec2 x = cfg.start;
  Vec2 r = rm_rhs({x[0], x[1]}, params);
  double r_norm = max_norm(r);
  if (r_norm <= cfg.tol) {
    result.success = true;
    result.iterate = x;
    return result;
  }

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    result.iterations = iter;
    const Mat2 j = rm_jacobian({x[0], x[1]}, params);
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if (std::abs(det) < 1e-14) {
      result.iterate = x;
      result.failure_reason = "singular jacobian";
      return result;
    }
    const Vec2 step = {(-r[0] * j[1][1] + r[1] * j[0][1]) / det,
                       (-r[1] * j[0][0] + r[0] * j[1][0]) / det};

    double alpha = 1.0;
    Vec2 x_trial{};
    Vec2 r_trial{};
    double trial_norm = 0.0;
    while (true) {
      x_trial = {x[0] + alpha * step[0], x[1] + alpha * step[1]};
      bool usable = 1.0 + x_trial[0] != 0.0;
      if (usable) {
        r_trial = rm_rhs({x_trial[0], x_trial[1]}, params);
        usable = finite(r_trial);
      }
      if (usable) {
        trial_norm = max_norm(r_trial);
        if (trial_norm < r_norm || alpha <= cfg.damping_min) break;
      } else if (alpha <= cfg.damping_min) {
        result.iterate = x;
        result.failure_reason = "step left the residual domain";
        return result;
      }
      alpha *= 0.5;
      if (alpha < cfg.damping_min) alpha = cfg.damping_min;
    }
    x = x_trial;
    r = r_trial;
    r_norm = trial_norm;
    if (r_norm <= cfg.tol) {
      result.success = true;
      result.iterate = x;
      return result;
    }
  }
  result.iterate = x;
  result.failure_reason = "no convergence within max_iters";
  return result;
}

OdeResult integrate_ode(const RMParams& params, const OdeConfig& cfg,
                        const OdeObserver& observer) {
  cfg.validate();
  OdeResult result;
  Vec2 x = cfg.initial;
  double t = 0.0;
  const auto max_steps = static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt));

  auto rhs = [&params](const Vec2& s) { return rm_rhs({s[0], s[1]}, params); };

  Vec2 k1 = rhs(x);
  for (std::size_t step = 0; step < max_steps; ++step) {
    if (max_norm(k1) <= cfg.steady_tol) {
      result.converged = true;
      break;
    }
    const double h = cfg.dt;
    const Vec2 k2 = rhs({x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]});
    const Vec2 k3 = rhs({x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]});
    const Vec2 k4 = rhs({x[0] + h * k3[0], x[1] + h * k3[1]});
    x = {x[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
         x[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
    t += h;
    ++result.steps;
    if (!finite(x)) {
      throw EvaluationError("time integration blew up at t = " + std::to_string(t));
    }
    if (observer) observer(t, x);
    k1 = rhs(x);
  }
  if (!result.converged && max_norm(k1) <= cfg.steady_tol) {
    result.converged = true;
  }
  result.state = x;
  result.t_end = t;
  return result;
}

HistogramResult histogram_newton(const ParameterLaw& law, std::size_t n, std::uint64_t seed,
                                 const NewtonConfig& cfg, const GridSpec2D& grid,
                                 int threads) {
  cfg.validate();
  return histogram_from_solver(law, n, seed, grid, threads,
                               [&cfg](const RMParams& p) -> std::optional<Vec2> {
                                 const NewtonResult r = newton_solve(p, cfg);
                                 if (!r.success) return std::nullopt;
                                 return r.iterate;
                               });
}

HistogramResult histogram_ode(const ParameterLaw& law, std::size_t n, std::uint64_t seed,
                              const OdeConfig& cfg, const GridSpec2D& grid, int threads) {
  cfg.validate();
  return histogram_from_solver(law, n, seed, grid, threads,
                               [&cfg](const RMParams& p) -> std::optional<Vec2> {
                                 const OdeResult r = integrate_ode(p, cfg);
                                 if (!r.converged) return std::nullopt;
                                 return r.state;
                               });
}

HistogramResult histogram_analytic(const ParameterLaw& law, std::size_t n,
                                   std::uint64_t seed, const GridSpec2D& grid) {
  return histogram_from_solver(law, n, seed, grid, 1,
                               [](const RMParams& p) -> std::optional<Vec2> {
                                 const auto states = rm_equilibria(p);
                                 if (states.size() < 3) return std::nullopt;
                                 return Vec2{states[2].x, states[2].y};
                               });
}

double total_variation(const DensityGrid2D& a, const DensityGrid2D& b) {
  if (a.spec() != b.spec()) {
    throw ContractError("total variation requires identical grid specs");
  }
  if (!a.normalized() || !b.normalized()) {
    throw ContractError("total variation requires normalized densities");
  }
  double sum = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) sum += std::abs(va[i] - vb[i]);
  return 0.5 * sum * a.spec().cell_area();
}

}  // namespace rdeq
