#pragma once

#include <optional>
#include <vector>

#include "hfot/forward.hpp"
#include "hfot/xray.hpp"

namespace hfot {

/// A^omega(s, theta): amplitude of the leading single-scattering term.
cplx amplitude_A(ParallelCoord c, double omega, const ScalarField& sigma, const PhaseFunction& phi,
                 const DiskDomain& d);
/// Closed-form upper bound of sup |1/A^omega| over the restricted line set.
double amplitude_inverse_bound(const ScalarField& sigma, const PhaseFunction& phi, const DiskDomain& d);

/// sup_x int E(x, y)/|x - y| dy over n_samples points of the disk, capped by 2 pi diameter.
double estimate_L_norm(const ScalarField& sigma, const DiskDomain& d, int n_samples);

/// Background and discretisation shared by every inversion step.
struct InversionConfig {
  DiskDomain domain;
  ScalarField sigma;
  PhaseFunction phi = PhaseFunction::isotropic();
  double omega = 256.0;
  FilterSpec filter;
  SinogramGrid grid;
  Lattice out;
  int max_iters = 10;
  /// Stop when sup |q_{n+1} - q_n| falls below this; <= 0 selects 1e-4 sup |q_0|.
  double stop_tol = 0.0;
  /// Contraction ball radius; <= 0 selects 0.8 / (sup phi * L-norm estimate).
  double K0 = 0.0;
  /// Contraction constant of R when known; in (0, 1) it turns the stopping test into
  /// c/(1-c) sup |q_{n+1} - q_n| < tol.
  double contraction = 0.0;
  McBudget forward_budget;
  QuadPolicy quad;
  /// Reuse the data's random streams in every residual evaluation.
  bool common_random_numbers = true;
  int threads = 0;

  double resolved_K0() const;
};

/// Real and imaginary parts of sqrt(omega) P^{-1,b}[chi g / A^omega].
struct Reconstruction {
  ScalarField real;
  ScalarField imag;
};

Reconstruction apply_inverse_parts(const ComplexSino& g, double omega, const InversionConfig& cfg);
/// Direct reconstruction of [k rho]_b from data at cfg.omega.
ScalarField apply_inverse(const Sinogram& data, const InversionConfig& cfg);
/// Variance of the direct reconstruction caused by Monte-Carlo noise in the data.
ScalarField inverse_variance(const RealSino& var_re, const RealSino& var_im, const RealSino& cov, double omega,
                             const InversionConfig& cfg);

/// Zeroes a field outside the disk of radius `radius`.
ScalarField mask_disk(const ScalarField& f, double radius);

/// Discrete band-limited projection [q]_b = P^{-1,b} P[q] on the inversion grids.
ScalarField lowpass_discrete(const ScalarField& q, const InversionConfig& cfg);

/// R^{omega,b}[q] split into the single- and multiple-scattering parts.
struct Residual {
  ScalarField total;
  ScalarField single;
  ScalarField multiple;
};

/// Medium whose k equals q/rho inside B_{r-2D}.
Medium medium_from_krho(const ScalarField& q, const InversionConfig& cfg);

/// Synthesised sinograms entering R[q]; linear post-processing turns them into fields.
struct ResidualData {
  ComplexSino single;
  ComplexSino multiple;
  RealSino projection;  ///< P[q] on the inversion grid
};

ResidualData residual_data(const ScalarField& q, const InversionConfig& cfg, std::uint64_t seed);
ResidualData operator-(const ResidualData& a, const ResidualData& b);
Residual residual_from_data(const ResidualData& data, const InversionConfig& cfg);

/// R[q]; throws PreconditionError when sup |q| exceeds the contraction ball.
Residual residual_R(const ScalarField& q, const InversionConfig& cfg, std::uint64_t seed);

struct ReconstructionState {
  std::vector<ScalarField> iterates;
  std::vector<double> step_norms;  ///< sup |q_n - q_{n-1}|, n >= 1
  std::vector<double> errors;      ///< sup |q_n - truth| when a truth is given
  std::vector<double> imag_norms;  ///< sup of the imaginary part of the direct reconstruction
  bool converged = false;
  double K0 = 0.0;
};

/// Fixed-point iteration q_{n+1} = q_0 - R[q_n].
ReconstructionState iterate(const Sinogram& data, const InversionConfig& cfg,
                            const std::optional<ScalarField>& truth = std::nullopt);

struct ContractionReport {
  double c1 = 0.0;
  std::vector<double> ratios;
  double K0 = 0.0;
};

/// Largest ratio sup|R[q] - R[q']| / sup|q - q'| over radial and random smooth perturbations of `base`
/// and of its radial image at 0.85 K0.
ContractionReport contraction_report(const InversionConfig& cfg, const ScalarField& base, int trial_count,
                                     double perturbation, std::uint64_t seed);

}  // namespace hfot
