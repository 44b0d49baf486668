#include "rdeq/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rdeq/errors.hpp"
#include "rdeq/toml_lite.hpp"

namespace rdeq {

namespace {

using nlohmann::ordered_json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

const ordered_json& require(const ordered_json& obj, const std::string& key,
                            const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError("missing '" + key + "' in " + context);
  }
  return obj.at(key);
}

double as_double(const ordered_json& v, const std::string& context) {
  if (!v.is_number()) throw ConfigError("expected a number for " + context);
  return v.get<double>();
}

std::int64_t as_int(const ordered_json& v, const std::string& context) {
  if (!v.is_number_integer()) throw ConfigError("expected an integer for " + context);
  return v.get<std::int64_t>();
}

std::string as_string(const ordered_json& v, const std::string& context) {
  if (!v.is_string()) throw ConfigError("expected a string for " + context);
  return v.get<std::string>();
}

GridSpec2D parse_grid(const ordered_json& obj, const std::string& context) {
  GridSpec2D g;
  g.x_min = as_double(require(obj, "x_min", context), context + ".x_min");
  g.x_max = as_double(require(obj, "x_max", context), context + ".x_max");
  g.y_min = as_double(require(obj, "y_min", context), context + ".y_min");
  g.y_max = as_double(require(obj, "y_max", context), context + ".y_max");
  g.nx = static_cast<std::size_t>(as_int(require(obj, "nx", context), context + ".nx"));
  g.ny = static_cast<std::size_t>(as_int(require(obj, "ny", context), context + ".ny"));
  try {
    g.validate();
  } catch (const std::exception& e) {
    throw ConfigError(context + ": " + e.what());
  }
  return g;
}

Vec2 parse_vec2(const ordered_json& v, const std::string& context) {
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError("expected a [x, y] pair for " + context);
  }
  return {as_double(v[0], context), as_double(v[1], context)};
}

NoiseSpec parse_noise(const ordered_json& v, const std::string& context) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError("expected a list of stds for " + context);
  }
  NoiseSpec n;
  for (const auto& e : v) n.stds.push_back(as_double(e, context));
  try {
    n.validate();
  } catch (const std::exception& e) {
    throw ConfigError(context + ": " + e.what());
  }
  return n;
}

MixtureDensity1D parse_marginal(const ordered_json& obj, const std::string& context) {
  const auto& comps = require(obj, "components", context);
  if (!comps.is_array() || comps.empty()) {
    throw ConfigError("expected a list of [weight, mean, std] triples in " + context);
  }
  std::vector<GaussianComponent> components;
  for (const auto& c : comps) {
    if (!c.is_array() || c.size() != 3) {
      throw ConfigError("each component in " + context + " must be [weight, mean, std]");
    }
    components.push_back({as_double(c[0], context), as_double(c[1], context),
                          as_double(c[2], context)});
  }
  std::optional<double> floor;
  if (obj.contains("support_floor")) {
    floor = as_double(obj.at("support_floor"), context + ".support_floor");
  } else {
    floor = 1e-6;  // the model needs strictly positive parameters
  }
  try {
    return MixtureDensity1D(std::move(components), floor);
  } catch (const std::exception& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

}  // namespace

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  const ordered_json root = parse_toml_lite(text);
  const std::string context = path.filename().string();

  ScenarioConfig cfg;
  cfg.scenario_hash = fnv1a_hex(text);
  cfg.name = as_string(require(root, "name", context), "name");
  cfg.model = as_string(require(root, "model", context), "model");
  if (cfg.model != kModelRosenzweigMacArthur) {
    throw ConfigError("unknown model '" + cfg.model + "' (available: " +
                      kModelRosenzweigMacArthur + ")");
  }
  const auto n_samples = as_int(require(root, "n_samples", context), "n_samples");
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  cfg.n_samples = static_cast<std::size_t>(n_samples);
  cfg.seed = static_cast<std::uint64_t>(as_int(require(root, "seed", context), "seed"));

  const auto& params = require(root, "parameters", context);
  for (const char* name : {"k", "m", "c"}) {
    cfg.marginals.push_back(
        parse_marginal(require(params, name, "[parameters]"), std::string("parameters.") + name));
  }

  const auto& noise = require(root, "noise", context);
  cfg.steady_noise = parse_noise(require(noise, "steady", "[noise]"), "noise.steady");
  cfg.eigen_noise = parse_noise(require(noise, "eigen", "[noise]"), "noise.eigen");
  if (cfg.steady_noise.stds.size() != 2 || cfg.eigen_noise.stds.size() != 2) {
    throw ConfigError("noise.steady and noise.eigen need exactly 2 stds");
  }

  cfg.steady_grid = parse_grid(require(root, "steady_grid", context), "[steady_grid]");

  if (root.contains("sigma_grid")) {
    cfg.sigma_grid = parse_grid(root.at("sigma_grid"), "[sigma_grid]");
  } else {
    cfg.sigma_grid = {-1.5, 1.5, -1.5, 1.5, 151, 151};
  }

  if (root.contains("kappa")) {
    const auto& kappa = root.at("kappa");
    cfg.kappa_region = parse_grid(kappa, "[kappa]");
    const std::string method = as_string(require(kappa, "method", "[kappa]"), "kappa.method");
    if (method == "grid") {
      cfg.kappa_method = KappaMethod::grid;
    } else if (method == "direct") {
      cfg.kappa_method = KappaMethod::direct;
    } else {
      throw ConfigError("kappa.method must be 'grid' or 'direct'");
    }
    if (kappa.contains("fixed_sigma")) {
      cfg.kappa_fixed_sigma = kappa.at("fixed_sigma").get<bool>();
    }
  } else {
    cfg.kappa_region = cfg.steady_grid;
    cfg.kappa_region.nx = 101;
    cfg.kappa_region.ny = 101;
  }

  if (root.contains("peaks")) {
    const auto& peaks = root.at("peaks");
    if (peaks.contains("threshold_fraction")) {
      cfg.peak_threshold = as_double(peaks.at("threshold_fraction"), "peaks.threshold_fraction");
    }
    if (peaks.contains("merge_radius")) {
      cfg.peak_merge_radius = static_cast<int>(as_int(peaks.at("merge_radius"), "peaks.merge_radius"));
    }
  }

  if (root.contains("probes")) {
    const auto& probes = root.at("probes");
    const auto& labels = require(probes, "labels", "[probes]");
    const auto& points = require(probes, "points", "[probes]");
    if (!labels.is_array() || !points.is_array() || labels.size() != points.size()) {
      throw ConfigError("probes.labels and probes.points must be arrays of equal length");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      cfg.probes.push_back({parse_vec2(points[i], "probes.points"),
                            as_string(labels[i], "probes.labels")});
    }
  }

  if (root.contains("verify")) {
    const auto& verify = root.at("verify");
    VerifySection v;
    v.n_newton = static_cast<std::size_t>(as_int(require(verify, "n_newton", "[verify]"), "verify.n_newton"));
    v.n_ode = static_cast<std::size_t>(as_int(require(verify, "n_ode", "[verify]"), "verify.n_ode"));
    const auto& newton = require(verify, "newton", "[verify]");
    v.newton.start = parse_vec2(require(newton, "start", "[verify.newton]"), "verify.newton.start");
    v.newton.tol = as_double(require(newton, "tol", "[verify.newton]"), "verify.newton.tol");
    v.newton.max_iters = static_cast<int>(as_int(require(newton, "max_iters", "[verify.newton]"), "verify.newton.max_iters"));
    if (newton.contains("damping_min")) {
      v.newton.damping_min = as_double(newton.at("damping_min"), "verify.newton.damping_min");
    }
    const auto& ode = require(verify, "ode", "[verify]");
    v.ode.initial = parse_vec2(require(ode, "initial", "[verify.ode]"), "verify.ode.initial");
    v.ode.dt = as_double(require(ode, "dt", "[verify.ode]"), "verify.ode.dt");
    v.ode.t_max = as_double(require(ode, "t_max", "[verify.ode]"), "verify.ode.t_max");
    v.ode.steady_tol = as_double(require(ode, "steady_tol", "[verify.ode]"), "verify.ode.steady_tol");
    v.grid = parse_grid(require(verify, "grid", "[verify]"), "[verify.grid]");
    try {
      v.newton.validate();
      v.ode.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("[verify]: ") + e.what());
    }
    cfg.verify = v;
  }

  return cfg;
}

}  // namespace rdeq
