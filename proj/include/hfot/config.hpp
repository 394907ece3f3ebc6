#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfot/fields.hpp"
#include "hfot/forward.hpp"
#include "hfot/inversion.hpp"
#include "hfot/xray.hpp"
#include "json.hpp"

namespace hfot {

/// Background extinction: a constant plus optional smooth bumps.
struct SigmaSpec {
  double value = 0.2;
  std::vector<PhantomComponent> components;
  int cells = 128;
};

struct PhaseSpec {
  std::string kind = "isotropic";  // isotropic | truncated_cosine
  double g = 0.0;
};

struct IterationSpec {
  int max_iters = 10;
  double stop_tol = 0.0;
  double K0 = 0.0;
  /// Known contraction constant of R; 0 lets sweep and iterate measure it.
  double contraction_estimate = 0.0;
  bool common_random_numbers = true;
};

struct VerifySpec {
  int sample_count = 10000;
  int pair_count = 100;
  double delta0 = 0.39269908169872414;  // pi / 8
  std::vector<double> stationary_phase_omegas{64.0, 256.0, 1024.0, 4096.0};
};

struct ContractionSpec {
  bool enabled = true;
  int trials = 3;
  double perturbation = 0.02;
};

struct ExperimentConfig {
  DiskDomain domain;
  PhantomSpec phantom;
  SigmaSpec sigma;
  PhaseSpec phase;
  std::vector<double> omega_list{64.0, 128.0, 256.0, 512.0};
  std::vector<double> b_list{4.0, 8.0, 16.0};
  FilterProfile filter_profile = FilterProfile::RaisedCosine;
  int n_s = 256;
  int n_theta = 256;
  int n_x = 512;
  McBudget mc;
  double noise_level = 0.0;
  std::string output_dir = "out";
  double k_step = 0.02;
  QuadPolicy quad;
  IterationSpec iteration;
  VerifySpec verify;
  ContractionSpec contraction;
  bool sweep_iterate = true;
  int threads = 0;

  void validate() const;
};

ExperimentConfig default_config();
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);
/// FNV-1a of the canonical JSON form.
std::string config_hash(const ExperimentConfig& cfg);

ScalarField make_sigma(const ExperimentConfig& cfg);
PhaseFunction make_phase(const ExperimentConfig& cfg);
Phantom make_phantom_fn(const ExperimentConfig& cfg);
Medium make_medium(const ExperimentConfig& cfg);
SinogramGrid make_grid(const ExperimentConfig& cfg);
Lattice make_lattice(const ExperimentConfig& cfg);
InversionConfig make_inversion(const ExperimentConfig& cfg, double omega, double b);

}  // namespace hfot
