#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "rdeq/grid.hpp"
#include "rdeq/model_rm.hpp"
#include "rdeq/sampling.hpp"

namespace rdeq {

struct NewtonConfig {
  Vec2 start = {0.3, 0.9};
  double tol = 1e-10;        // max-norm residual target
  int max_iters = 60;
  double damping_min = 1.0 / 1024.0;

  void validate() const;
};

struct OdeConfig {
  Vec2 initial = {0.3, 0.9};
  double dt = 0.01;
  double t_max = 2000.0;
  double steady_tol = 1e-8;  // max-norm of the right hand side

  void validate() const;
};

struct NewtonResult {
  bool success = false;
  Vec2 iterate = {0.0, 0.0};  // root on success, last iterate otherwise
  int iterations = 0;
  std::string failure_reason;
};

/// Damped Newton iteration on the steady-state residual with the analytic
/// Jacobian. Backtracking halves the step until the residual max-norm
/// decreases or the damping floor is reached.
NewtonResult newton_solve(const RMParams& params, const NewtonConfig& cfg);

struct OdeResult {
  Vec2 state = {0.0, 0.0};
  bool converged = false;
  double t_end = 0.0;
  std::size_t steps = 0;
};

using OdeObserver = std::function<void(double t, const Vec2& state)>;

/// Fixed-step classical Runge-Kutta integration of the predator-prey system
/// until the right hand side max-norm drops below steady_tol or t reaches
/// t_max. Throws EvaluationError if the state becomes non-finite. The
/// observer, when given, sees every accepted step.
OdeResult integrate_ode(const RMParams& params, const OdeConfig& cfg,
                        const OdeObserver& observer = {});

struct HistogramResult {
  DensityGrid2D density;       // normalized over the grid window
  std::size_t n_total = 0;
  std::size_t n_binned = 0;    // successes landing inside the window
  std::size_t n_failed = 0;    // solver failures / non-converged runs
  bool degenerate_warning = false;  // more than half the runs failed

  double failure_rate() const {
    return n_total == 0 ? 0.0 : static_cast<double>(n_failed) / static_cast<double>(n_total);
  }
};

/// Verification histogram from repeated Newton solves over plain independent
/// parameter draws. Failures are excluded from the bins and reported.
HistogramResult histogram_newton(const ParameterLaw& law, std::size_t n, std::uint64_t seed,
                                 const NewtonConfig& cfg, const GridSpec2D& grid,
                                 int threads = 0);

/// Verification histogram from repeated time integration; only converged
/// runs are binned, so unstable steady states never acquire mass.
HistogramResult histogram_ode(const ParameterLaw& law, std::size_t n, std::uint64_t seed,
                              const OdeConfig& cfg, const GridSpec2D& grid,
                              int threads = 0);

/// Closed-form oracle histogram: bins the coexistence equilibrium of each
/// parameter draw directly. Shares the plain sampler, so a matched seed
/// reproduces the draws used by histogram_newton.
HistogramResult histogram_analytic(const ParameterLaw& law, std::size_t n,
                                   std::uint64_t seed, const GridSpec2D& grid);

/// Total variation distance (1/2) sum |a - b| dx dy between two normalized
/// densities on identical grids. Throws ContractError otherwise.
double total_variation(const DensityGrid2D& a, const DensityGrid2D& b);

}  // namespace rdeq
