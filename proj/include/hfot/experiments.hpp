#pragma once

#include <string>
#include <vector>

#include "hfot/config.hpp"
#include "hfot/forward.hpp"
#include "hfot/inversion.hpp"
#include "hfot/oscphase.hpp"
#include "json.hpp"

namespace hfot {

/// Full-data synthesis (T_1 plus orders 2..M) for one configured frequency.
Synthesis synthesize_for(const ExperimentConfig& cfg, const Medium& m, double omega);

/// [k rho]_b on the output lattice: FBP of the discrete chord integrals of k rho.
ScalarField lowpass_truth(const RealSino& krho_projection, const InversionConfig& ic);

/// Gaussian test integral int e^{i omega x^2/2} e^{-x^2} dx by stationary_phase_1d.
StationaryPhaseResult gaussian_quadratic_case(double omega);

struct SweepRow {
  double omega = 0.0;
  double b = 0.0;
  double direct_error = 0.0;
  double iterated_error = -1.0;  // < 0 when not computed
  double c1 = -1.0;              // < 0 when not computed
  double mc_stderr = 0.0;        // sup of the pointwise MC standard error of the direct reconstruction
  int iterations = 0;
  std::string status = "ok";
};

struct SweepFit {
  double b = 0.0;
  double slope = 0.0;
  std::string verdict;
};

struct ContractionShape {
  double C1 = 0.0;
  double C2 = 0.0;
  double rms_log_residual = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepFit> fits;
  ContractionShape shape;
};

/// Contraction constant around `base` with the configured trial budget.
ContractionReport measure_contraction(const ExperimentConfig& cfg, const InversionConfig& ic, const ScalarField& base);

SweepResult run_sweep(const ExperimentConfig& cfg);
std::string sweep_csv(const SweepResult& res);
std::string fits_csv(const SweepResult& res);

/// c1 ~ C1 (b^2 + b^5)/omega + C2 b^3 omega^{-1/2} log(omega/b), C1, C2 >= 0.
ContractionShape fit_contraction_shape(const std::vector<double>& omega, const std::vector<double>& b,
                                       const std::vector<double>& c1);

/// Pointwise and sampled checks of the stationary-phase machinery.
struct VerifyReport {
  nlohmann::json report;
  std::vector<std::string> failures;
};
VerifyReport run_verify(const ExperimentConfig& cfg);

/// n, step, error table for an iteration run.
std::string iteration_csv(const ReconstructionState& st);

}  // namespace hfot
