#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdeq/errors.hpp"
#include "rdeq/gridio.hpp"
#include "rdeq/runner.hpp"
#include "rdeq/scenario.hpp"
#include "rdeq/verify.hpp"
#include "rdeq/version.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out = "out";
  int threads = 0;
  std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "Output directory");
  cmd->add_option("--threads", args.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--seed", args.seed, "Override the scenario seed");
}

rdeq::RunOptions make_options(const CommonArgs& args) {
  rdeq::RunOptions opts;
  opts.out_dir = args.out;
  opts.threads = args.threads;
  if (args.seed >= 0) opts.seed_override = static_cast<std::uint64_t>(args.seed);
  return opts;
}

int fail_with_json(const std::string& type, const std::string& message) {
  nlohmann::ordered_json err;
  err["error"] = {{"type", type}, {"message", message}};
  std::cerr << err.dump() << "\n";
  return 1;
}

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const rdeq::ConfigError*>(&e)) return "config";
  if (dynamic_cast<const rdeq::ParseError*>(&e)) return "parse";
  if (dynamic_cast<const rdeq::SamplingError*>(&e)) return "sampling";
  if (dynamic_cast<const rdeq::EvaluationError*>(&e)) return "evaluation";
  if (dynamic_cast<const rdeq::DegeneratePosteriorError*>(&e)) return "degenerate_posterior";
  if (dynamic_cast<const rdeq::ContractError*>(&e)) return "contract";
  if (dynamic_cast<const rdeq::IoError*>(&e)) return "io";
  return "runtime";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state posterior densities and stability maps for random-parameter ODE systems"};
  app.set_version_flag("--version", rdeq::kVersion);
  app.require_subcommand(1);

  CommonArgs steady_args, kappa_args, eig_args, verify_args, sweep_args;
  std::vector<double> sweep_stds;

  auto* steady = app.add_subcommand("steady", "Steady-state posterior, heatmap and peaks");
  add_common(steady, steady_args);

  auto* kappa = app.add_subcommand("kappa", "Stability probability map");
  add_common(kappa, kappa_args);

  auto* eig = app.add_subcommand("eig", "Eigenvalue densities at the configured probes");
  add_common(eig, eig_args);

  auto* verify = app.add_subcommand("verify", "Newton / ODE verification histograms");
  add_common(verify, verify_args);

  auto* sweep = app.add_subcommand("sweep", "Posterior stabilization sweep over noise widths");
  add_common(sweep, sweep_args);
  sweep->add_option("--stds", sweep_stds, "Noise stds to sweep, widest first")
      ->required()
      ->delimiter(',');

  std::string peaks_grid;
  double peaks_threshold = 0.05;
  int peaks_merge = 3;
  std::string peaks_out;
  auto* peaks = app.add_subcommand("peaks", "Detect peaks in a stored grid");
  peaks->add_option("grid", peaks_grid, "Grid CSV file")->required()->check(CLI::ExistingFile);
  peaks->add_option("--threshold", peaks_threshold, "Relative detection threshold");
  peaks->add_option("--merge-radius", peaks_merge, "Merge radius in cells");
  peaks->add_option("--out", peaks_out, "Write peaks JSON here instead of stdout");

  std::string compare_a, compare_b;
  auto* compare = app.add_subcommand("compare", "Total variation distance of two grids");
  compare->add_option("a", compare_a, "First grid CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("b", compare_b, "Second grid CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (steady->parsed()) {
      const auto cfg = rdeq::load_scenario(steady_args.config);
      const auto run = rdeq::run_steady(cfg, make_options(steady_args));
      std::cout << "steady: " << run.peaks.peaks.size() << " peak(s), outputs in "
                << steady_args.out << "\n";
    } else if (kappa->parsed()) {
      const auto cfg = rdeq::load_scenario(kappa_args.config);
      rdeq::run_kappa(cfg, make_options(kappa_args));
      std::cout << "kappa: map written to " << kappa_args.out << "\n";
    } else if (eig->parsed()) {
      const auto cfg = rdeq::load_scenario(eig_args.config);
      const auto run = rdeq::run_eig_probes(cfg, make_options(eig_args));
      std::cout << "eig: " << run.labels.size() << " probe(s) written to " << eig_args.out
                << "\n";
    } else if (verify->parsed()) {
      const auto cfg = rdeq::load_scenario(verify_args.config);
      const auto run = rdeq::run_verify(cfg, make_options(verify_args));
      std::cout << "verify: tv_newton=" << run.tv_posterior_newton
                << " tv_ode=" << run.tv_posterior_ode
                << " newton_failure_rate=" << run.newton.failure_rate()
                << " ode_nonconverged_rate=" << run.ode.failure_rate() << "\n";
      if (run.newton.degenerate_warning || run.ode.degenerate_warning) {
        std::cerr << "warning: more than half of the verification runs failed\n";
      }
    } else if (sweep->parsed()) {
      const auto cfg = rdeq::load_scenario(sweep_args.config);
      const auto entries = rdeq::sweep_noise(cfg, make_options(sweep_args), sweep_stds);
      for (const auto& e : entries) {
        std::cout << "sigma_b=" << e.sigma_b << " tv_from_previous=" << e.tv_from_previous
                  << " wall_seconds=" << e.wall_seconds << "\n";
      }
    } else if (peaks->parsed()) {
      const auto grid = rdeq::read_grid_csv(peaks_grid);
      const auto list = rdeq::find_peaks(grid, peaks_threshold, peaks_merge);
      nlohmann::ordered_json out;
      out["threshold_fraction"] = list.threshold_fraction;
      out["merge_radius"] = list.merge_radius;
      out["peaks"] = nlohmann::ordered_json::array();
      for (const auto& p : list.peaks) {
        out["peaks"].push_back({{"x", p.x}, {"y", p.y}, {"density", p.density}});
      }
      if (peaks_out.empty()) {
        std::cout << out.dump(2) << "\n";
      } else {
        std::ofstream file(peaks_out);
        if (!file) throw rdeq::IoError("cannot write " + peaks_out);
        file << out.dump(2) << "\n";
      }
    } else if (compare->parsed()) {
      auto a = rdeq::read_grid_csv(compare_a);
      auto b = rdeq::read_grid_csv(compare_b);
      // Stored grids may be raw; compare distributions.
      const double tv = rdeq::total_variation(rdeq::normalize(a), rdeq::normalize(b));
      nlohmann::ordered_json out;
      out["tv"] = tv;
      std::cout << out.dump() << "\n";
    }
  } catch (const std::exception& e) {
    return fail_with_json(error_type(e), e.what());
  }
  return 0;
}
