#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rdeq/grid.hpp"
#include "rdeq/mixture.hpp"
#include "rdeq/randeq.hpp"
#include "rdeq/stability.hpp"
#include "rdeq/verify.hpp"

namespace rdeq {

inline constexpr const char* kModelRosenzweigMacArthur = "rosenzweig-macarthur";

struct VerifySection {
  std::size_t n_newton = 240000;
  std::size_t n_ode = 20000;
  NewtonConfig newton;
  OdeConfig ode;
  GridSpec2D grid;
};

/// One scenario file, fully validated. Parameters are ordered (k, m, c).
struct ScenarioConfig {
  std::string name;
  std::string model;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  std::vector<MixtureDensity1D> marginals;
  NoiseSpec steady_noise;
  NoiseSpec eigen_noise;

  GridSpec2D steady_grid;
  GridSpec2D sigma_grid;          // eigenvalue probe window
  GridSpec2D kappa_region;
  KappaMethod kappa_method = KappaMethod::direct;
  bool kappa_fixed_sigma = false;  // grid method: use sigma_grid instead of
                                   // per-cell adaptive windows

  double peak_threshold = 0.05;
  int peak_merge_radius = 3;

  std::vector<ProbePoint> probes;
  std::optional<VerifySection> verify;

  std::string scenario_hash;  // FNV-1a of the config file bytes

  ParameterLaw law() const { return ParameterLaw(marginals); }
};

ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace rdeq
