#include "rdeq/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include <json.hpp>

#include "rdeq/errors.hpp"
#include "rdeq/version.hpp"

namespace rdeq {

namespace {

using nlohmann::ordered_json;

std::uint64_t effective_seed(const ScenarioConfig& cfg, const RunOptions& opts) {
  return opts.seed_override.value_or(cfg.seed);
}

std::vector<std::string> artifact_metadata(const ScenarioConfig& cfg, std::uint64_t seed) {
  return {"scenario_hash=" + cfg.scenario_hash + " seed=" + std::to_string(seed) +
          " tool_version=" + kVersion};
}

std::string sanitize_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && '9' >= c) || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "probe" : out;
}

// summary.json accumulates sections across subcommands run into the same
// output directory.
void update_summary(const ScenarioConfig& cfg, const RunOptions& opts, std::uint64_t seed,
                    const std::function<void(ordered_json&)>& patch) {
  const auto path = opts.out_dir / "summary.json";
  ordered_json summary = ordered_json::object();
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    try {
      summary = ordered_json::parse(in);
    } catch (...) {
      summary = ordered_json::object();
    }
  }
  summary["scenario"] = cfg.name;
  summary["scenario_hash"] = cfg.scenario_hash;
  summary["tool_version"] = kVersion;
  summary["seed"] = seed;
  summary["n_samples"] = cfg.n_samples;
  summary["noise_stds"] = cfg.steady_noise.stds;
  patch(summary);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << summary.dump(2) << "\n";
}

void ensure_out_dir(const RunOptions& opts) {
  std::filesystem::create_directories(opts.out_dir);
}

DensityGrid2D steady_posterior(const ScenarioConfig& cfg, const RunOptions& opts,
                               std::uint64_t seed, const GridSpec2D& grid,
                               const NoiseSpec& noise) {
  const SampleMatrix samples = lhs_sample(cfg.law(), cfg.n_samples, seed);
  const RmSteadySystem system;
  return normalize(posterior_unnormalized(system, samples, noise, grid, opts.threads));
}

}  // namespace

SteadyRun run_steady(const ScenarioConfig& cfg, const RunOptions& opts) {
  ensure_out_dir(opts);
  const std::uint64_t seed = effective_seed(cfg, opts);
  DensityGrid2D posterior =
      steady_posterior(cfg, opts, seed, cfg.steady_grid, cfg.steady_noise);
  PeakList peaks = find_peaks(posterior, cfg.peak_threshold, cfg.peak_merge_radius);

  const auto metadata = artifact_metadata(cfg, seed);
  write_grid_csv(posterior, opts.out_dir / "steady.csv", metadata);
  write_heatmap_pgm(posterior, opts.out_dir / "steady.pgm", 0.5, metadata);

  ordered_json peaks_json;
  peaks_json["scenario"] = cfg.name;
  peaks_json["scenario_hash"] = cfg.scenario_hash;
  peaks_json["tool_version"] = kVersion;
  peaks_json["seed"] = seed;
  peaks_json["threshold_fraction"] = peaks.threshold_fraction;
  peaks_json["merge_radius"] = peaks.merge_radius;
  peaks_json["peaks"] = ordered_json::array();
  for (const auto& p : peaks.peaks) {
    peaks_json["peaks"].push_back({{"x", p.x}, {"y", p.y}, {"density", p.density}});
  }
  {
    std::ofstream out(opts.out_dir / "peaks.json");
    if (!out) throw IoError("cannot write peaks.json");
    out << peaks_json.dump(2) << "\n";
  }

  update_summary(cfg, opts, seed, [&](ordered_json& summary) {
    summary["peaks"] = peaks_json["peaks"];
  });
  return {std::move(posterior), std::move(peaks)};
}

KappaRun run_kappa(const ScenarioConfig& cfg, const RunOptions& opts) {
  ensure_out_dir(opts);
  const std::uint64_t seed = effective_seed(cfg, opts);
  const SampleMatrix samples = lhs_sample(cfg.law(), cfg.n_samples, seed);
  const std::optional<GridSpec2D> sigma =
      cfg.kappa_fixed_sigma ? std::optional<GridSpec2D>(cfg.sigma_grid) : std::nullopt;
  KappaGrid map = kappa_map(cfg.kappa_region, samples, cfg.kappa_method, cfg.eigen_noise,
                            sigma, opts.threads);

  const auto metadata = artifact_metadata(cfg, seed);
  const DensityGrid2D as_grid = map.as_grid();
  write_grid_csv(as_grid, opts.out_dir / "kappa.csv", metadata);
  write_heatmap_pgm(as_grid, opts.out_dir / "kappa.pgm", 1.0, metadata);

  update_summary(cfg, opts, seed, [&](ordered_json& summary) {
    summary["kappa_method"] =
        cfg.kappa_method == KappaMethod::direct ? "direct" : "grid";
  });
  return {std::move(map)};
}

EigProbeRun run_eig_probes(const ScenarioConfig& cfg, const RunOptions& opts) {
  ensure_out_dir(opts);
  const std::uint64_t seed = effective_seed(cfg, opts);
  const SampleMatrix samples = lhs_sample(cfg.law(), cfg.n_samples, seed);
  const auto metadata = artifact_metadata(cfg, seed);

  EigProbeRun run;
  ordered_json probes_json = ordered_json::array();
  for (const auto& probe : cfg.probes) {
    const DensityGrid2D density =
        eig_posterior(probe.location, samples, cfg.eigen_noise, cfg.sigma_grid, opts.threads);
    const double kappa = kappa_from_grid(density);
    const std::string stem = "eig_probe_" + sanitize_label(probe.label);
    write_grid_csv(density, opts.out_dir / (stem + ".csv"), metadata);
    write_heatmap_pgm(density, opts.out_dir / (stem + ".pgm"), 0.5, metadata);
    run.labels.push_back(probe.label);
    run.kappas.push_back(kappa);
    probes_json.push_back({{"label", probe.label},
                           {"x", probe.location[0]},
                           {"y", probe.location[1]},
                           {"kappa", kappa}});
  }

  update_summary(cfg, opts, seed, [&](ordered_json& summary) {
    summary["kappa_probes"] = probes_json;
  });
  return run;
}

VerifyRun run_verify(const ScenarioConfig& cfg, const RunOptions& opts) {
  if (!cfg.verify) {
    throw ConfigError("scenario '" + cfg.name + "' has no [verify] section");
  }
  ensure_out_dir(opts);
  const std::uint64_t seed = effective_seed(cfg, opts);
  const VerifySection& section = *cfg.verify;
  const ParameterLaw law = cfg.law();

  DensityGrid2D posterior =
      steady_posterior(cfg, opts, seed, section.grid, cfg.steady_noise);
  HistogramResult newton = histogram_newton(law, section.n_newton, seed + 1,
                                            section.newton, section.grid, opts.threads);
  HistogramResult ode =
      histogram_ode(law, section.n_ode, seed + 2, section.ode, section.grid, opts.threads);

  VerifyRun run{std::move(posterior), std::move(newton), std::move(ode)};
  run.tv_posterior_newton = total_variation(run.posterior, run.newton.density);
  run.tv_posterior_ode = total_variation(run.posterior, run.ode.density);

  const auto metadata = artifact_metadata(cfg, seed);
  write_grid_csv(run.posterior, opts.out_dir / "verify_posterior.csv", metadata);
  write_grid_csv(run.newton.density, opts.out_dir / "verify_newton.csv", metadata);
  write_grid_csv(run.ode.density, opts.out_dir / "verify_ode.csv", metadata);

  update_summary(cfg, opts, seed, [&](ordered_json& summary) {
    summary["verification"] = {{"tv_newton", run.tv_posterior_newton},
                               {"tv_ode", run.tv_posterior_ode},
                               {"newton_failure_rate", run.newton.failure_rate()},
                               {"ode_nonconverged_rate", run.ode.failure_rate()}};
  });
  return run;
}

std::vector<SweepEntry> sweep_noise(const ScenarioConfig& cfg, const RunOptions& opts,
                                    const std::vector<double>& stds) {
  if (stds.empty()) throw ConfigError("noise sweep needs at least one std");
  ensure_out_dir(opts);
  const std::uint64_t seed = effective_seed(cfg, opts);

  std::vector<SweepEntry> entries;
  std::optional<DensityGrid2D> previous;
  for (double sigma : stds) {
    NoiseSpec noise{{sigma, sigma}};
    const auto start = std::chrono::steady_clock::now();
    DensityGrid2D posterior =
        steady_posterior(cfg, opts, seed, cfg.steady_grid, noise);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    const double tv = previous ? total_variation(*previous, posterior)
                               : std::numeric_limits<double>::quiet_NaN();
    entries.push_back({sigma, tv, elapsed.count()});
    previous = std::move(posterior);
  }

  ordered_json report;
  report["scenario"] = cfg.name;
  report["scenario_hash"] = cfg.scenario_hash;
  report["tool_version"] = kVersion;
  report["seed"] = seed;
  report["runs"] = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json run = {{"sigma_b", e.sigma_b}, {"wall_seconds", e.wall_seconds}};
    if (std::isnan(e.tv_from_previous)) {
      run["tv_from_previous"] = nullptr;
    } else {
      run["tv_from_previous"] = e.tv_from_previous;
    }
    report["runs"].push_back(run);
  }
  std::ofstream out(opts.out_dir / "sweep.json");
  if (!out) throw IoError("cannot write sweep.json");
  out << report.dump(2) << "\n";
  return entries;
}

}  // namespace rdeq
