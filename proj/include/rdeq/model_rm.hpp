#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "rdeq/randeq.hpp"

namespace rdeq {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Rosenzweig-MacArthur parameters: prey capacity k, kill/reproduction
/// rate m, predator death rate c. All positive.
struct RMParams {
  double k;
  double m;
  double c;

  void validate() const;
};

/// Normalized populations: x prey, y predator. Trajectories live in the
/// closed positive quadrant; residual evaluation additionally accepts any
/// finite x except the pole at x = -1.
struct PopulationState {
  double x;
  double y;
};

/// Eigenvalues of a real 2x2 Jacobian: either both real or a conjugate
/// pair. No ordering is promised.
struct ComplexEigenPair {
  std::complex<double> lambda1;
  std::complex<double> lambda2;
};

/// Right hand side (dx/ds, dy/ds) of the predator-prey system with Holling
/// type II response. Throws EvaluationError at the pole x = -1.
Vec2 rm_rhs(const PopulationState& s, const RMParams& p);

/// Steady-state residual with params packed as (k, m, c); identical to
/// rm_rhs by construction.
Vec2 rm_steady_residual(std::span<const double> point, std::span<const double> params);

/// All equilibria: (0,0) and (k,0) always; the coexistence state
/// (c/(m-c), (1/m)(1+c/(m-c))(1-c/(k(m-c)))) when m > c and k > c/(m-c).
std::vector<PopulationState> rm_equilibria(const RMParams& p);

Mat2 rm_jacobian(const PopulationState& s, const RMParams& p);

/// Roots of lambda^2 - tr(J) lambda + det(J). Triangular Jacobians yield
/// their diagonal entries exactly; otherwise the cancellation-free quadratic
/// formula is used.
ComplexEigenPair rm_eigenvalues(const PopulationState& s, const RMParams& p);

/// Real and imaginary part of the characteristic polynomial evaluated at
/// sigma1 + i sigma2, as a residual pair in sigma. The first component is
/// even and the second odd under sigma2 -> -sigma2, exactly.
Vec2 rm_charpoly_residual(std::span<const double> sigma, std::span<const double> location,
                          std::span<const double> params);

/// M_steady as a residual system: D=2 (state), K=3 (k,m,c), R=2.
class RmSteadySystem final : public ResidualSystem {
 public:
  std::size_t point_dim() const override { return 2; }
  std::size_t param_dim() const override { return 3; }
  std::size_t residual_dim() const override { return 2; }
  void eval(std::span<const double> point, std::span<const double> params,
            std::span<double> out) const override;
};

/// M_eig as a residual system in sigma with the state-space location frozen.
class RmEigSystem final : public ResidualSystem {
 public:
  explicit RmEigSystem(Vec2 location) : location_(location) {}

  Vec2 location() const { return location_; }
  std::size_t point_dim() const override { return 2; }
  std::size_t param_dim() const override { return 3; }
  std::size_t residual_dim() const override { return 2; }
  void eval(std::span<const double> sigma, std::span<const double> params,
            std::span<double> out) const override;

 private:
  Vec2 location_;
};

}  // namespace rdeq
