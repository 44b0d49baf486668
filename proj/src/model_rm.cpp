#include "rdeq/model_rm.hpp"

#include <cmath>
#include <stdexcept>

#include "rdeq/errors.hpp"

namespace rdeq {

namespace {

void check_pole(double x) {
  if (1.0 + x == 0.0) {
    throw EvaluationError("residual undefined at the pole x = -1");
  }
}

// trace and determinant of the Jacobian, shared by the eigenvalue solver
// and the characteristic-polynomial residual so both see the same rounding.
struct TraceDet {
  double trace;
  double det;
};

TraceDet trace_det(double x, double y, double k, double m, double c) {
  const double one_plus_x = 1.0 + x;
  const double u = 1.0 - 2.0 * x / k - m * y / (one_plus_x * one_plus_x);
  const double v = -c + m * x / one_plus_x;
  const double cross = m * m * x * y / (one_plus_x * one_plus_x * one_plus_x);
  return {u + v, u * v + cross};
}

}  // namespace

void RMParams::validate() const {
  if (!(k > 0.0) || !(m > 0.0) || !(c > 0.0)) {
    throw std::invalid_argument("model parameters k, m, c must be positive");
  }
}

Vec2 rm_rhs(const PopulationState& s, const RMParams& p) {
  check_pole(s.x);
  const double interaction = p.m * s.x * s.y / (1.0 + s.x);
  return {s.x * (1.0 - s.x / p.k) - interaction, -p.c * s.y + interaction};
}

Vec2 rm_steady_residual(std::span<const double> point, std::span<const double> params) {
  return rm_rhs({point[0], point[1]}, {params[0], params[1], params[2]});
}

std::vector<PopulationState> rm_equilibria(const RMParams& p) {
  p.validate();
  std::vector<PopulationState> states = {{0.0, 0.0}, {p.k, 0.0}};
  if (p.m > p.c) {
    const double x = p.c / (p.m - p.c);
    if (p.k > x) {
      const double y = (1.0 / p.m) * (1.0 + x) * (1.0 - x / p.k);
      states.push_back({x, y});
    }
  }
  return states;
}

Mat2 rm_jacobian(const PopulationState& s, const RMParams& p) {
  check_pole(s.x);
  const double one_plus_x = 1.0 + s.x;
  const double denom_sq = one_plus_x * one_plus_x;
  return {{{1.0 - 2.0 * s.x / p.k - p.m * s.y / denom_sq, -p.m * s.x / one_plus_x},
           {p.m * s.y / denom_sq, -p.c + p.m * s.x / one_plus_x}}};
}

ComplexEigenPair rm_eigenvalues(const PopulationState& s, const RMParams& p) {
  const Mat2 j = rm_jacobian(s, p);
  if (j[0][1] * j[1][0] == 0.0) {
    // Triangular: the diagonal entries are the eigenvalues, no rounding from
    // the quadratic formula. Covers the trivial equilibria exactly.
    return {{j[0][0], 0.0}, {j[1][1], 0.0}};
  }
  const auto [trace, det] = trace_det(s.x, s.y, p.k, p.m, p.c);
  const double disc = trace * trace - 4.0 * det;
  if (disc < 0.0) {
    const double im = 0.5 * std::sqrt(-disc);
    return {{0.5 * trace, im}, {0.5 * trace, -im}};
  }
  const double sign = trace >= 0.0 ? 1.0 : -1.0;
  const double q = 0.5 * (trace + sign * std::sqrt(disc));
  if (q == 0.0) {
    return {{0.0, 0.0}, {0.0, 0.0}};
  }
  return {{q, 0.0}, {det / q, 0.0}};
}

Vec2 rm_charpoly_residual(std::span<const double> sigma, std::span<const double> location,
                          std::span<const double> params) {
  check_pole(location[0]);
  const auto [trace, det] =
      trace_det(location[0], location[1], params[0], params[1], params[2]);
  const double s1 = sigma[0];
  const double s2 = sigma[1];
  // s2 enters the first component only squared and the second only as an
  // overall factor, so the even/odd parity is exact in floating point.
  return {s1 * s1 - s2 * s2 - trace * s1 + det, s2 * (2.0 * s1 - trace)};
}

void RmSteadySystem::eval(std::span<const double> point, std::span<const double> params,
                          std::span<double> out) const {
  const Vec2 r = rm_steady_residual(point, params);
  out[0] = r[0];
  out[1] = r[1];
}

void RmEigSystem::eval(std::span<const double> sigma, std::span<const double> params,
                       std::span<double> out) const {
  const Vec2 r = rm_charpoly_residual(sigma, location_, params);
  out[0] = r[0];
  out[1] = r[1];
}

}  // namespace rdeq
