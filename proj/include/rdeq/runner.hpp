#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "rdeq/gridio.hpp"
#include "rdeq/scenario.hpp"
#include "rdeq/stability.hpp"
#include "rdeq/verify.hpp"

namespace rdeq {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int threads = 0;  // 0 = hardware concurrency
  std::optional<std::uint64_t> seed_override;
};

struct SteadyRun {
  DensityGrid2D posterior;
  PeakList peaks;
};

/// Steady-state posterior: sample, evaluate, normalize, emit steady.csv,
/// steady.pgm and peaks.json.
SteadyRun run_steady(const ScenarioConfig& cfg, const RunOptions& opts);

struct KappaRun {
  KappaGrid map;
};

/// Stability map over the configured region; emits kappa.csv and kappa.pgm.
KappaRun run_kappa(const ScenarioConfig& cfg, const RunOptions& opts);

struct EigProbeRun {
  std::vector<std::string> labels;
  std::vector<double> kappas;  // per-probe stability probability
};

/// Eigenvalue density per probe point; emits eig_probe_<label>.csv/.pgm and
/// records per-probe kappa values in the summary.
EigProbeRun run_eig_probes(const ScenarioConfig& cfg, const RunOptions& opts);

struct VerifyRun {
  DensityGrid2D posterior;     // steady posterior on the verification window
  HistogramResult newton;
  HistogramResult ode;
  double tv_posterior_newton = 0.0;
  double tv_posterior_ode = 0.0;
};

/// Independent verification: Newton and ODE histograms on the verification
/// window plus total-variation distances against the posterior; emits
/// verify_newton.csv, verify_ode.csv and the summary verification block.
VerifyRun run_verify(const ScenarioConfig& cfg, const RunOptions& opts);

struct SweepEntry {
  double sigma_b;
  double tv_from_previous;  // NaN for the first run
  double wall_seconds;
};

/// Posterior stabilization sweep over noise widths; emits sweep.json.
std::vector<SweepEntry> sweep_noise(const ScenarioConfig& cfg, const RunOptions& opts,
                                    const std::vector<double>& stds);

}  // namespace rdeq
