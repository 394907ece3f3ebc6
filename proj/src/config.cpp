#include "hfot/config.hpp"

#include <algorithm>

#include "hfot/errors.hpp"
#include "hfot/io.hpp"

namespace hfot {

using nlohmann::json;

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

template <class T>
T take(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

PhantomComponent component_from_json(const json& j) {
  check_keys(j, {"kind", "center", "radius", "width", "amplitude"}, "phantom component");
  PhantomComponent c;
  c.kind = take<std::string>(j, "kind", c.kind);
  if (c.kind != "bump" && c.kind != "gaussian" && c.kind != "disk" && c.kind != "ring")
    throw ConfigError("unknown phantom kind '" + c.kind + "'");
  const auto center = take<std::vector<double>>(j, "center", {0.0, 0.0});
  if (center.size() != 2) throw ConfigError("phantom center must have two entries");
  c.center = {center[0], center[1]};
  c.radius = take<double>(j, "radius", c.radius);
  c.width = take<double>(j, "width", c.width);
  c.amplitude = take<double>(j, "amplitude", c.amplitude);
  return c;
}

json component_to_json(const PhantomComponent& c) {
  return {{"kind", c.kind},
          {"center", {c.center.x, c.center.y}},
          {"radius", c.radius},
          {"width", c.width},
          {"amplitude", c.amplitude}};
}

std::vector<PhantomComponent> components_from_json(const json& j, const char* key) {
  std::vector<PhantomComponent> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) throw ConfigError(std::string(key) + " must be an array");
  for (const auto& c : j.at(key)) out.push_back(component_from_json(c));
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (omega_list.empty()) throw ConfigError("omega_list must not be empty");
  for (std::size_t k = 0; k < omega_list.size(); ++k) {
    if (!(omega_list[k] > 0.0)) throw ConfigError("omega_list entries must be positive");
    if (k > 0 && !(omega_list[k] > omega_list[k - 1])) throw ConfigError("omega_list must be sorted ascending");
  }
  if (b_list.empty()) throw ConfigError("b_list must not be empty");
  for (double b : b_list)
    if (!(b > 0.0)) throw ConfigError("b_list entries must be positive");
  for (int n : {n_s, n_theta, n_x})
    if (!power_of_two(n) || n > 1024) throw ConfigError("grid sizes must be powers of two <= 1024");
  if (!(sigma.value >= 0.0)) throw ConfigError("sigma value must be nonnegative");
  if (sigma.cells < 2) throw ConfigError("sigma cells must be >= 2");
  if (phase.kind != "isotropic" && phase.kind != "truncated_cosine")
    throw ConfigError("unknown phase function '" + phase.kind + "'");
  if (phase.kind == "truncated_cosine" && !(phase.g >= 0.0 && phase.g <= 1.0))
    throw ConfigError("truncated_cosine needs 0 <= g <= 1");
  mc.validate();
  if (!(noise_level >= 0.0)) throw ConfigError("noise_level must be nonnegative");
  if (!(k_step > 0.0)) throw ConfigError("k_step must be positive");
  if (quad.points_per_wavelength < 4.0) throw ConfigError("points_per_wavelength must be >= 4");
  if (iteration.max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (iteration.contraction_estimate < 0.0 || iteration.contraction_estimate >= 1.0)
    throw ConfigError("contraction_estimate must lie in [0, 1)");
  if (verify.sample_count < 0 || verify.pair_count < 0) throw ConfigError("verify counts must be >= 0");
  if (!(verify.delta0 > 0.0 && verify.delta0 < 1.5707963267948966)) throw ConfigError("delta0 must lie in (0, pi/2)");
  if (contraction.trials < 0 || !(contraction.perturbation > 0.0)) throw ConfigError("bad contraction settings");
  // Constructing the phantom enforces the support hypothesis.
  Phantom(phantom, domain);
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  PhantomComponent a;
  a.kind = "bump";
  a.center = {0.15, 0.1};
  a.radius = 0.35;
  a.amplitude = 1.0;
  PhantomComponent b;
  b.kind = "bump";
  b.center = {-0.2, -0.15};
  b.radius = 0.25;
  b.amplitude = 0.6;
  c.phantom.components = {a, b};
  c.phantom.krho_max = 0.1;
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, {"domain", "phantom", "sigma", "phase_function", "omega_list", "b_list", "filter_profile", "grid",
                 "mc", "seed", "noise_level", "output_dir", "k_step", "quad", "iteration", "verify", "contraction",
                 "sweep_iterate", "threads"},
             "config");
  ExperimentConfig c = default_config();
  try {
    if (j.contains("domain")) {
      const json& d = j.at("domain");
      check_keys(d, {"r", "D"}, "domain");
      c.domain = DiskDomain(take<double>(d, "r", 1.0), take<double>(d, "D", 0.2));
    }
    if (j.contains("phantom")) {
      const json& p = j.at("phantom");
      check_keys(p, {"components", "krho_max"}, "phantom");
      c.phantom.components = components_from_json(p, "components");
      c.phantom.krho_max = take<double>(p, "krho_max", 0.0);
    }
    if (j.contains("sigma")) {
      const json& s = j.at("sigma");
      check_keys(s, {"value", "components", "cells"}, "sigma");
      c.sigma.value = take<double>(s, "value", c.sigma.value);
      c.sigma.components = components_from_json(s, "components");
      c.sigma.cells = take<int>(s, "cells", c.sigma.cells);
    }
    if (j.contains("phase_function")) {
      const json& p = j.at("phase_function");
      check_keys(p, {"kind", "g"}, "phase_function");
      c.phase.kind = take<std::string>(p, "kind", c.phase.kind);
      c.phase.g = take<double>(p, "g", c.phase.g);
    }
    c.omega_list = take<std::vector<double>>(j, "omega_list", c.omega_list);
    c.b_list = take<std::vector<double>>(j, "b_list", c.b_list);
    if (j.contains("filter_profile")) c.filter_profile = FilterSpec::parse_profile(j.at("filter_profile").get<std::string>());
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      check_keys(g, {"n_s", "n_theta", "n_x"}, "grid");
      c.n_s = take<int>(g, "n_s", c.n_s);
      c.n_theta = take<int>(g, "n_theta", c.n_theta);
      c.n_x = take<int>(g, "n_x", c.n_x);
    }
    if (j.contains("mc")) {
      const json& m = j.at("mc");
      check_keys(m, {"n_paths", "max_order"}, "mc");
      c.mc.n_paths = take<int>(m, "n_paths", c.mc.n_paths);
      c.mc.max_order = take<int>(m, "max_order", c.mc.max_order);
    }
    c.mc.seed = take<std::uint64_t>(j, "seed", c.mc.seed);
    c.noise_level = take<double>(j, "noise_level", c.noise_level);
    c.output_dir = take<std::string>(j, "output_dir", c.output_dir);
    c.k_step = take<double>(j, "k_step", c.k_step);
    if (j.contains("quad")) {
      const json& q = j.at("quad");
      check_keys(q, {"points_per_wavelength"}, "quad");
      c.quad.points_per_wavelength = take<double>(q, "points_per_wavelength", c.quad.points_per_wavelength);
    }
    if (j.contains("iteration")) {
      const json& it = j.at("iteration");
      check_keys(it, {"max_iters", "stop_tol", "K0", "contraction_estimate", "common_random_numbers"}, "iteration");
      c.iteration.max_iters = take<int>(it, "max_iters", c.iteration.max_iters);
      c.iteration.stop_tol = take<double>(it, "stop_tol", c.iteration.stop_tol);
      c.iteration.K0 = take<double>(it, "K0", c.iteration.K0);
      c.iteration.contraction_estimate = take<double>(it, "contraction_estimate", c.iteration.contraction_estimate);
      c.iteration.common_random_numbers = take<bool>(it, "common_random_numbers", c.iteration.common_random_numbers);
    }
    if (j.contains("verify")) {
      const json& v = j.at("verify");
      check_keys(v, {"sample_count", "pair_count", "delta0", "stationary_phase_omegas"}, "verify");
      c.verify.sample_count = take<int>(v, "sample_count", c.verify.sample_count);
      c.verify.pair_count = take<int>(v, "pair_count", c.verify.pair_count);
      c.verify.delta0 = take<double>(v, "delta0", c.verify.delta0);
      c.verify.stationary_phase_omegas = take<std::vector<double>>(v, "stationary_phase_omegas", c.verify.stationary_phase_omegas);
    }
    if (j.contains("contraction")) {
      const json& v = j.at("contraction");
      check_keys(v, {"enabled", "trials", "perturbation"}, "contraction");
      c.contraction.enabled = take<bool>(v, "enabled", c.contraction.enabled);
      c.contraction.trials = take<int>(v, "trials", c.contraction.trials);
      c.contraction.perturbation = take<double>(v, "perturbation", c.contraction.perturbation);
    }
    c.sweep_iterate = take<bool>(j, "sweep_iterate", c.sweep_iterate);
    c.threads = take<int>(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json comps = json::array();
  for (const auto& p : c.phantom.components) comps.push_back(component_to_json(p));
  json sig = json::array();
  for (const auto& p : c.sigma.components) sig.push_back(component_to_json(p));
  return {{"domain", {{"r", c.domain.r}, {"D", c.domain.D}}},
          {"phantom", {{"components", comps}, {"krho_max", c.phantom.krho_max}}},
          {"sigma", {{"value", c.sigma.value}, {"components", sig}, {"cells", c.sigma.cells}}},
          {"phase_function", {{"kind", c.phase.kind}, {"g", c.phase.g}}},
          {"omega_list", c.omega_list},
          {"b_list", c.b_list},
          {"filter_profile", FilterSpec{c.filter_profile}.profile_name()},
          {"grid", {{"n_s", c.n_s}, {"n_theta", c.n_theta}, {"n_x", c.n_x}}},
          {"mc", {{"n_paths", c.mc.n_paths}, {"max_order", c.mc.max_order}}},
          {"seed", c.mc.seed},
          {"noise_level", c.noise_level},
          {"output_dir", c.output_dir},
          {"k_step", c.k_step},
          {"quad", {{"points_per_wavelength", c.quad.points_per_wavelength}}},
          {"iteration",
           {{"max_iters", c.iteration.max_iters},
            {"stop_tol", c.iteration.stop_tol},
            {"K0", c.iteration.K0},
            {"contraction_estimate", c.iteration.contraction_estimate},
            {"common_random_numbers", c.iteration.common_random_numbers}}},
          {"verify",
           {{"sample_count", c.verify.sample_count},
            {"pair_count", c.verify.pair_count},
            {"delta0", c.verify.delta0},
            {"stationary_phase_omegas", c.verify.stationary_phase_omegas}}},
          {"contraction",
           {{"enabled", c.contraction.enabled},
            {"trials", c.contraction.trials},
            {"perturbation", c.contraction.perturbation}}},
          {"sweep_iterate", c.sweep_iterate},
          {"threads", c.threads}};
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("threads");
  j.erase("output_dir");
  return fnv1a_hex(j.dump());
}

ScalarField make_sigma(const ExperimentConfig& cfg) {
  const Lattice lat(cfg.sigma.cells, cfg.domain.r);
  if (cfg.sigma.components.empty()) return ScalarField::constant(lat, cfg.sigma.value);
  PhantomSpec spec;
  spec.components = cfg.sigma.components;
  const Phantom bumps(spec, cfg.domain);
  const double base = cfg.sigma.value;
  ScalarField f = ScalarField::sample(lat, [&](Vec2 x) { return base + bumps(x); }, cfg.domain.r);
  for (double v : f.values())
    if (v < 0.0) throw ConfigError("sigma must be nonnegative everywhere");
  return f;
}

PhaseFunction make_phase(const ExperimentConfig& cfg) {
  if (cfg.phase.kind == "truncated_cosine") return PhaseFunction::truncated_cosine(cfg.phase.g);
  return PhaseFunction::isotropic();
}

Phantom make_phantom_fn(const ExperimentConfig& cfg) { return Phantom(cfg.phantom, cfg.domain); }

Medium make_medium(const ExperimentConfig& cfg) {
  return make_medium(cfg.domain, make_sigma(cfg), make_phase(cfg), make_phantom_fn(cfg), cfg.k_step);
}

SinogramGrid make_grid(const ExperimentConfig& cfg) { return SinogramGrid(cfg.n_s, cfg.n_theta, cfg.domain); }

Lattice make_lattice(const ExperimentConfig& cfg) { return Lattice(cfg.n_x, cfg.domain.r); }

InversionConfig make_inversion(const ExperimentConfig& cfg, double omega, double b) {
  InversionConfig ic;
  ic.domain = cfg.domain;
  ic.sigma = make_sigma(cfg);
  ic.phi = make_phase(cfg);
  ic.omega = omega;
  ic.filter.profile = cfg.filter_profile;
  ic.filter.b = b;
  ic.grid = make_grid(cfg);
  ic.out = make_lattice(cfg);
  ic.max_iters = cfg.iteration.max_iters;
  ic.stop_tol = cfg.iteration.stop_tol;
  ic.K0 = cfg.iteration.K0;
  ic.contraction = cfg.iteration.contraction_estimate;
  ic.forward_budget = cfg.mc;
  ic.quad = cfg.quad;
  ic.common_random_numbers = cfg.iteration.common_random_numbers;
  ic.threads = cfg.threads;
  return ic;
}

}  // namespace hfot
