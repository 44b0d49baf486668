#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rdeq/errors.hpp"
#include "rdeq/model_rm.hpp"
#include "rdeq/randeq.hpp"
#include "test_util.hpp"

using rdeq::DensityGrid2D;
using rdeq::GridSpec2D;
using rdeq::NoiseSpec;
using rdeq::ResidualSystem;
using rdeq::SampleMatrix;
using rdeq::test::uniform;

namespace {

/// M(x; A) = x, any parameter dimension.
class IdentitySystem final : public ResidualSystem {
 public:
  explicit IdentitySystem(std::size_t k) : k_(k) {}
  std::size_t point_dim() const override { return 2; }
  std::size_t param_dim() const override { return k_; }
  std::size_t residual_dim() const override { return 2; }
  void eval(std::span<const double> point, std::span<const double>,
            std::span<double> out) const override {
    out[0] = point[0];
    out[1] = point[1];
  }

 private:
  std::size_t k_;
};

/// M(x; A) = 0 everywhere.
class ZeroSystem final : public ResidualSystem {
 public:
  std::size_t point_dim() const override { return 2; }
  std::size_t param_dim() const override { return 1; }
  std::size_t residual_dim() const override { return 2; }
  void eval(std::span<const double>, std::span<const double>,
            std::span<double> out) const override {
    out[0] = 0.0;
    out[1] = 0.0;
  }
};

/// Produces a NaN residual at points with x > 0.5.
class PartialSystem final : public ResidualSystem {
 public:
  std::size_t point_dim() const override { return 2; }
  std::size_t param_dim() const override { return 1; }
  std::size_t residual_dim() const override { return 2; }
  void eval(std::span<const double> point, std::span<const double>,
            std::span<double> out) const override {
    out[0] = point[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : point[0];
    out[1] = point[1];
  }
};

SampleMatrix near_point_mass_rm_samples(std::size_t n) {
  const rdeq::ParameterLaw law({rdeq::MixtureDensity1D({{1.0, 1.0, 1e-8}}),
                                rdeq::MixtureDensity1D({{1.0, 1.0, 1e-8}}),
                                rdeq::MixtureDensity1D({{1.0, 0.25, 1e-8}})});
  return rdeq::lhs_sample(law, n, 2026);
}

}  // namespace

TEST_CASE("posterior of the identity system is the Gaussian noise density") {
  const IdentitySystem system(3);
  const SampleMatrix sample = SampleMatrix::from_values({0.1, 0.2, 0.3}, 3);
  const NoiseSpec noise{{1.0, 1.0}};
  const GridSpec2D grid{-2.0, 2.0, -2.0, 2.0, 21, 21};
  const DensityGrid2D out = rdeq::posterior_unnormalized(system, sample, noise, grid);

  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x_center(ix);
      const double y = grid.y_center(iy);
      const double expected =
          std::exp(-0.5 * (x * x + y * y)) / (2.0 * std::numbers::pi);
      CHECK(out.at(ix, iy) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("single-sample posterior equals the direct residual-density product") {
  std::mt19937_64 rng(21);
  const rdeq::RmSteadySystem system;
  const SampleMatrix sample = SampleMatrix::from_values({1.05, 0.93, 0.27}, 3);
  const NoiseSpec noise{{0.02, 0.03}};
  const GridSpec2D grid{0.0, 1.5, 0.0, 1.5, 40, 40};
  const DensityGrid2D out = rdeq::posterior_unnormalized(system, sample, noise, grid);

  for (int check = 0; check < 200; ++check) {
    const std::size_t ix = rng() % grid.nx;
    const std::size_t iy = rng() % grid.ny;
    const double point[2] = {grid.x_center(ix), grid.y_center(iy)};
    double res[2];
    system.eval(point, sample.row(0), res);
    double expected = 1.0;
    for (int r = 0; r < 2; ++r) {
      const double s = noise.stds[r];
      expected *= std::exp(-0.5 * (res[r] / s) * (res[r] / s)) /
                  (s * std::sqrt(2.0 * std::numbers::pi));
    }
    CHECK(out.at(ix, iy) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("near-point-mass parameters localize the coexistence state") {
  const rdeq::RmSteadySystem system;
  const SampleMatrix samples = near_point_mass_rm_samples(64);
  const NoiseSpec noise{{0.005, 0.005}};
  const GridSpec2D grid{0.0, 1.5, 0.0, 1.5, 200, 200};
  const DensityGrid2D out = rdeq::posterior_unnormalized(system, samples, noise, grid);

  const auto [ix, iy] = out.argmax_cell();
  CHECK(std::abs(grid.x_center(ix) - 1.0 / 3.0) <= grid.dx());
  CHECK(std::abs(grid.y_center(iy) - 8.0 / 9.0) <= grid.dy());
}

TEST_CASE("normalize: uniform grid becomes the uniform density") {
  const GridSpec2D spec{0.0, 1.0, 0.0, 1.0, 10, 10};
  DensityGrid2D g(spec, std::vector<double>(100, 7.25), false);
  const DensityGrid2D n = rdeq::normalize(g);
  for (double v : n.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(n.normalized());
  CHECK(n.riemann_mass() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normalize: idempotent, argmax preserved") {
  std::mt19937_64 rng(22);
  const GridSpec2D spec{-1.0, 2.0, 0.5, 3.5, 13, 9};
  std::vector<double> values(13 * 9);
  for (auto& v : values) v = uniform(rng, 0.0, 5.0);
  DensityGrid2D g(spec, values, false);

  const auto before = g.argmax_cell();
  const DensityGrid2D once = rdeq::normalize(g);
  const DensityGrid2D twice = rdeq::normalize(once);
  CHECK(once.argmax_cell() == before);
  for (std::size_t i = 0; i < once.values().size(); ++i) {
    CHECK(once.values()[i] == twice.values()[i]);
  }
}

TEST_CASE("normalize: all-zero grid is degenerate") {
  DensityGrid2D g({0.0, 1.0, 0.0, 1.0, 4, 4}, false);
  CHECK_THROWS_AS(rdeq::normalize(g), rdeq::DegeneratePosteriorError);
}

TEST_CASE("posterior is linear in sample concatenation") {
  std::mt19937_64 rng(23);
  std::vector<double> rows1, rows2;
  for (int i = 0; i < 7; ++i) {
    rows1.push_back(uniform(rng, 0.8, 1.2));
    rows1.push_back(uniform(rng, 0.8, 1.2));
    rows1.push_back(uniform(rng, 0.2, 0.3));
  }
  for (int i = 0; i < 13; ++i) {
    rows2.push_back(uniform(rng, 0.8, 1.2));
    rows2.push_back(uniform(rng, 0.8, 1.2));
    rows2.push_back(uniform(rng, 0.2, 0.3));
  }
  std::vector<double> all = rows1;
  all.insert(all.end(), rows2.begin(), rows2.end());

  const rdeq::RmSteadySystem system;
  const NoiseSpec noise{{0.05, 0.05}};
  const GridSpec2D grid{0.0, 1.5, 0.0, 1.5, 25, 25};
  const auto p1 = rdeq::posterior_unnormalized(system, SampleMatrix::from_values(rows1, 3),
                                               noise, grid);
  const auto p2 = rdeq::posterior_unnormalized(system, SampleMatrix::from_values(rows2, 3),
                                               noise, grid);
  const auto pc = rdeq::posterior_unnormalized(system, SampleMatrix::from_values(all, 3),
                                               noise, grid);
  for (std::size_t i = 0; i < pc.values().size(); ++i) {
    const double weighted = (7.0 * p1.values()[i] + 13.0 * p2.values()[i]) / 20.0;
    CHECK(pc.values()[i] == doctest::Approx(weighted).epsilon(1e-12));
  }
}

TEST_CASE("posterior is bit-identical under sample permutation") {
  std::mt19937_64 rng(24);
  std::vector<double> rows;
  for (int i = 0; i < 50; ++i) {
    rows.push_back(uniform(rng, 0.8, 1.2));
    rows.push_back(uniform(rng, 0.8, 1.2));
    rows.push_back(uniform(rng, 0.2, 0.3));
  }
  const SampleMatrix samples = SampleMatrix::from_values(rows, 3);
  std::vector<std::size_t> order(50);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const SampleMatrix shuffled = samples.permuted(order);

  const rdeq::RmSteadySystem system;
  const NoiseSpec noise{{0.01, 0.01}};
  const GridSpec2D grid{0.0, 1.5, 0.0, 1.5, 30, 30};
  const auto a = rdeq::posterior_unnormalized(system, samples, noise, grid);
  const auto b = rdeq::posterior_unnormalized(system, shuffled, noise, grid);
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    CHECK(a.values()[i] == b.values()[i]);
  }
}

TEST_CASE("zero residual everywhere yields the noise density at zero, exactly") {
  const ZeroSystem system;
  // Power-of-two sample count: the 1/N average introduces no extra rounding.
  const SampleMatrix samples = SampleMatrix::from_values(std::vector<double>(64, 0.0), 1);
  const NoiseSpec noise{{0.005, 0.012}};
  const GridSpec2D grid{0.0, 1.0, 0.0, 1.0, 5, 5};
  const auto out = rdeq::posterior_unnormalized(system, samples, noise, grid);
  const double expected = noise.density_at_zero();
  for (double v : out.values()) CHECK(v == expected);
}

TEST_CASE("parallel evaluation matches serial bit for bit") {
  std::mt19937_64 rng(25);
  std::vector<double> rows;
  for (int i = 0; i < 40; ++i) {
    rows.push_back(uniform(rng, 0.8, 1.2));
    rows.push_back(uniform(rng, 0.8, 1.2));
    rows.push_back(uniform(rng, 0.2, 0.3));
  }
  const SampleMatrix samples = SampleMatrix::from_values(rows, 3);
  const rdeq::RmSteadySystem system;
  const NoiseSpec noise{{0.01, 0.01}};
  const GridSpec2D grid{0.0, 1.5, 0.0, 1.5, 33, 29};
  const auto serial = rdeq::posterior_unnormalized(system, samples, noise, grid, 1);
  const auto parallel = rdeq::posterior_unnormalized(system, samples, noise, grid, 4);
  for (std::size_t i = 0; i < serial.values().size(); ++i) {
    CHECK(serial.values()[i] == parallel.values()[i]);
  }
}

TEST_CASE("non-finite residuals report the cell and sample row") {
  const PartialSystem system;
  const SampleMatrix samples = SampleMatrix::from_values({1.0, 2.0}, 1);
  const NoiseSpec noise{{1.0, 1.0}};
  const GridSpec2D grid{0.0, 1.0, 0.0, 1.0, 4, 4};
  try {
    rdeq::posterior_unnormalized(system, samples, noise, grid);
    FAIL("expected EvaluationError");
  } catch (const rdeq::EvaluationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("cell") != std::string::npos);
    CHECK(msg.find("sample row") != std::string::npos);
  }
}

TEST_CASE("posterior validates dimensions") {
  const rdeq::RmSteadySystem system;
  const NoiseSpec noise{{0.01, 0.01}};
  const GridSpec2D grid{0.0, 1.0, 0.0, 1.0, 4, 4};
  const SampleMatrix wrong_cols = SampleMatrix::from_values({1.0, 1.0}, 2);
  CHECK_THROWS_AS(rdeq::posterior_unnormalized(system, wrong_cols, noise, grid),
                  rdeq::ContractError);
  const SampleMatrix ok = SampleMatrix::from_values({1.0, 1.0, 0.25}, 3);
  const NoiseSpec wrong_noise{{0.01}};
  CHECK_THROWS_AS(rdeq::posterior_unnormalized(system, ok, wrong_noise, grid),
                  rdeq::ContractError);
}
