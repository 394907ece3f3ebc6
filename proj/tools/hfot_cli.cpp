#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hfot/config.hpp"
#include "hfot/errors.hpp"
#include "hfot/experiments.hpp"
#include "hfot/io.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

hfot::ExperimentConfig resolve(const Common& c) {
  hfot::ExperimentConfig cfg = c.config_path.empty() ? hfot::default_config() : hfot::load_config(c.config_path);
  if (c.seed) cfg.mc.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  cfg.validate();
  return cfg;
}

std::string tag(double v) { return hfot::format_double(v); }

std::string path_in(const hfot::ExperimentConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output_dir) / name).string();
}

void write_json(const std::string& path, const json& j) { hfot::write_text(path, j.dump(2) + "\n"); }

int cmd_synth(const Common& common) {
  const hfot::ExperimentConfig cfg = resolve(common);
  const std::string hash = hfot::config_hash(cfg);
  const hfot::Medium m = hfot::make_medium(cfg);
  json files = json::array();
  for (double omega : cfg.omega_list) {
    hfot::Synthesis syn = hfot::synthesize_for(cfg, m, omega);
    auto emit = [&](const std::string& kind, const hfot::ComplexSino& values) {
      hfot::Sinogram s;
      s.data = values;
      s.omega = omega;
      s.domain = cfg.domain;
      s.meta = syn.data.meta;
      s.meta["kind"] = kind;
      s.meta["config_hash"] = hash;
      const std::string name = kind + "_w" + tag(omega) + ".hrts";
      hfot::write_sinogram(path_in(cfg, name), s);
      files.push_back({{"file", name}, {"kind", kind}, {"omega", omega}});
    };
    emit("data", syn.data.data);
    emit("single", syn.single);
    emit("leading", syn.leading);
    emit("multiple", syn.multiple);
    std::cout << "omega " << omega << ": wrote data, single, leading, multiple\n";
  }
  json settings = hfot::config_to_json(cfg);
  settings.erase("output_dir");
  settings.erase("threads");
  const json manifest = {{"config_hash", hash},
                         {"config", settings},
                         {"seed", cfg.mc.seed},
                         {"budget", {{"n_paths", cfg.mc.n_paths}, {"max_order", cfg.mc.max_order}}},
                         {"files", files}};
  write_json(path_in(cfg, "manifest.json"), manifest);
  return 0;
}

void check_frequency(const hfot::ExperimentConfig& cfg, const hfot::Sinogram& s) {
  for (double w : cfg.omega_list)
    if (std::abs(w - s.omega) <= 1e-12 * w) return;
  throw hfot::ConfigError("sinogram frequency " + tag(s.omega) + " is not in the configured omega_list");
}

void check_grid(const hfot::ExperimentConfig& cfg, const hfot::Sinogram& s) {
  if (s.data.grid.n_s != cfg.n_s || s.data.grid.n_theta != cfg.n_theta)
    throw hfot::ConfigError("sinogram grid does not match the configured n_s x n_theta");
  if (std::abs(s.domain.r - cfg.domain.r) > 1e-12 || std::abs(s.domain.D - cfg.domain.D) > 1e-12)
    throw hfot::ConfigError("sinogram domain does not match the configured domain");
}

std::optional<hfot::ScalarField> truth_for(const hfot::ExperimentConfig& cfg, const hfot::InversionConfig& ic) {
  if (cfg.phantom.components.empty()) return std::nullopt;
  const hfot::Medium m = hfot::make_medium(cfg);
  return hfot::lowpass_truth(hfot::krho_projection(m, ic.grid, ic.threads), ic);
}

int cmd_invert(const Common& common, const std::string& sino_path, std::optional<double> b_opt) {
  const hfot::ExperimentConfig cfg = resolve(common);
  const hfot::Sinogram s = hfot::read_sinogram(sino_path);
  check_frequency(cfg, s);
  check_grid(cfg, s);
  std::vector<double> bs = b_opt ? std::vector<double>{*b_opt} : cfg.b_list;
  json results = json::array();
  const std::string hash = hfot::config_hash(cfg);
  for (double b : bs) {
    const hfot::InversionConfig ic = hfot::make_inversion(cfg, s.omega, b);
    const double R = cfg.domain.support_radius();
    const hfot::Reconstruction parts = hfot::apply_inverse_parts(s.data, s.omega, ic);
    const hfot::ScalarField q0 = hfot::mask_disk(parts.real, R);
    json entry = {{"omega", s.omega}, {"b", b}, {"imag_sup", hfot::sup_norm(parts.imag, R)}};
    if (const auto truth = truth_for(cfg, ic)) entry["error_sup"] = hfot::sup_diff(q0, *truth, R);
    const std::string stem = "recon_w" + tag(s.omega) + "_b" + tag(b);
    hfot::write_grid_csv(path_in(cfg, stem + ".csv"), q0);
    hfot::write_grid(path_in(cfg, stem + ".hrtg"), q0, {{"config_hash", hash}, {"omega", s.omega}, {"b", b}});
    entry["files"] = {stem + ".csv", stem + ".hrtg"};
    results.push_back(entry);
    std::cout << "b " << b << ": " << entry.dump() << "\n";
  }
  write_json(path_in(cfg, "invert_w" + tag(s.omega) + ".json"),
             {{"config_hash", hash}, {"source", fs::path(sino_path).filename().string()}, {"results", results}});
  return 0;
}

int cmd_iterate(const Common& common, const std::string& sino_path, std::optional<double> b_opt) {
  const hfot::ExperimentConfig cfg = resolve(common);
  const hfot::Sinogram s = hfot::read_sinogram(sino_path);
  check_frequency(cfg, s);
  check_grid(cfg, s);
  const double b = b_opt ? *b_opt : cfg.b_list.front();
  hfot::InversionConfig ic = hfot::make_inversion(cfg, s.omega, b);
  if (s.meta.contains("budget") && s.meta["budget"].contains("seed"))
    ic.forward_budget.seed = s.meta["budget"]["seed"].get<std::uint64_t>();
  const auto truth = truth_for(cfg, ic);
  json contraction = nullptr;
  if (ic.contraction <= 0.0 && cfg.contraction.enabled && cfg.contraction.trials > 0) {
    const double R = cfg.domain.support_radius();
    const hfot::ScalarField q0 = hfot::mask_disk(hfot::apply_inverse(s, ic), R);
    const hfot::ContractionReport rep = hfot::measure_contraction(cfg, ic, q0);
    contraction = {{"c1", rep.c1}, {"ratios", rep.ratios}};
    if (rep.c1 < 1.0) ic.contraction = rep.c1;
  }
  const hfot::ReconstructionState st = hfot::iterate(s, ic, truth);
  const std::string hash = hfot::config_hash(cfg);
  const std::string stem = "iterate_w" + tag(s.omega) + "_b" + tag(b);
  hfot::write_text(path_in(cfg, stem + ".csv"), hfot::iteration_csv(st));
  for (std::size_t n = 0; n < st.iterates.size(); ++n)
    hfot::write_grid(path_in(cfg, stem + "_q" + std::to_string(n) + ".hrtg"), st.iterates[n],
                     {{"config_hash", hash}, {"omega", s.omega}, {"b", b}, {"iteration", n}});
  hfot::write_grid_csv(path_in(cfg, stem + "_final.csv"), st.iterates.back());
  write_json(path_in(cfg, stem + ".json"), {{"config_hash", hash},
                                             {"K0", st.K0},
                                             {"converged", st.converged},
                                             {"contraction", contraction},
                                             {"iterations", st.step_norms.size()},
                                             {"errors", st.errors},
                                             {"step_norms", st.step_norms},
                                             {"imag_sup", st.imag_norms}});
  std::cout << hfot::iteration_csv(st);
  return 0;
}

int cmd_sweep(const Common& common) {
  const hfot::ExperimentConfig cfg = resolve(common);
  const hfot::SweepResult res = hfot::run_sweep(cfg);
  hfot::write_text(path_in(cfg, "sweep.csv"), hfot::sweep_csv(res));
  hfot::write_text(path_in(cfg, "sweep_fits.csv"), hfot::fits_csv(res));
  std::cout << hfot::sweep_csv(res) << hfot::fits_csv(res);
  return 0;
}

int cmd_verify(const Common& common) {
  const hfot::ExperimentConfig cfg = resolve(common);
  const hfot::VerifyReport rep = hfot::run_verify(cfg);
  write_json(path_in(cfg, "verify_report.json"), rep.report);
  std::cout << rep.report.dump(2) << "\n";
  if (!rep.failures.empty()) {
    for (const auto& f : rep.failures) std::cerr << "violation: " << f << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-harmonic transport tomography: synthesis, inversion and verification"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON experiment configuration");
    sub->add_option("--out", common.out_dir, "Output directory (overrides config)");
    sub->add_option("--seed", common.seed, "Random seed (overrides config)");
    sub->add_option("--threads", common.threads, "Worker threads, 0 = auto");
  };
  std::string sino_path;
  std::optional<double> b_opt;

  auto* synth = app.add_subcommand("synth", "Synthesize measurement sinograms for every configured frequency");
  add_common(synth);
  auto* invert = app.add_subcommand("invert", "Direct reconstruction of [k rho]_b from a sinogram");
  add_common(invert);
  invert->add_option("sinogram", sino_path, "Input sinogram (.hrts)")->required();
  invert->add_option("--b", b_opt, "Bandwidth (default: every configured b)");
  auto* iter = app.add_subcommand("iterate", "Fixed-point reconstruction from a sinogram");
  add_common(iter);
  iter->add_option("sinogram", sino_path, "Input sinogram (.hrts)")->required();
  iter->add_option("--b", b_opt, "Bandwidth (default: first configured b)");
  auto* sweep = app.add_subcommand("sweep", "Frequency/bandwidth sweep with scaling fits");
  add_common(sweep);
  auto* verify = app.add_subcommand("verify", "Stationary-phase bound and identity checks");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(common);
    if (invert->parsed()) return cmd_invert(common, sino_path, b_opt);
    if (iter->parsed()) return cmd_iterate(common, sino_path, b_opt);
    if (sweep->parsed()) return cmd_sweep(common);
    if (verify->parsed()) return cmd_verify(common);
  } catch (const hfot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hfot::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 3;
  } catch (const hfot::DomainError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 3;
  } catch (const hfot::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
