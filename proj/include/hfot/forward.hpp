#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hfot/fields.hpp"
#include "hfot/sinogram.hpp"
#include "json.hpp"

namespace hfot {

using cplx = std::complex<double>;

/// Known optical background plus the scattering coefficient being imaged.
struct Medium {
  DiskDomain domain;
  ScalarField sigma;
  PhaseFunction phi = PhaseFunction::isotropic();
  FieldFn k;
  /// Radius of a centred disk containing supp k (at most r - 2D).
  double k_support = 0.0;
  /// Smallest length scale of k; bounds quadrature steps from above.
  double k_step = 0.01;
  /// sup |k|, used for the series tail estimate.
  double k_sup = 0.0;
};

/// Medium with k given by an analytic phantom.
Medium make_medium(const DiskDomain& d, const ScalarField& sigma, const PhaseFunction& phi, const Phantom& k,
                   double k_step);
/// Medium with k given on a lattice.
Medium make_medium(const DiskDomain& d, const ScalarField& sigma, const PhaseFunction& phi, const ScalarField& k);

/// Measurement array at one modulation frequency.
struct Sinogram {
  ComplexSino data;
  double omega = 0.0;
  DiskDomain domain;
  nlohmann::json meta = nlohmann::json::object();
};

/// Monte-Carlo budget for the collision orders m >= 2.
struct McBudget {
  int n_paths = 1000;
  int max_order = 4;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Resolution policy of the single-scattering quadrature.
struct QuadPolicy {
  double points_per_wavelength = 10.0;
};

/// Unscattered contribution T_0.
cplx ballistic(ParallelCoord c, double omega, const Medium& m);

/// Midpoint lattice over supp k, reused for every line at a fixed frequency.
class SingleScatterQuadrature {
 public:
  SingleScatterQuadrature(const Medium& m, double omega, const QuadPolicy& policy = {});

  cplx evaluate(ParallelCoord c) const;
  double step() const { return step_; }
  std::size_t size() const { return points_.size(); }

 private:
  const Medium* medium_;
  double omega_;
  double step_;
  std::vector<Vec2> points_;
  std::vector<double> weights_;
};

/// Single-scattering term T_1 at one line.
cplx single_scattering(ParallelCoord c, double omega, const Medium& m, const QuadPolicy& policy = {});

/// Leading single-scattering term given the line integral of k rho.
cplx leading_single_from_projection(ParallelCoord c, double omega, const Medium& m, double krho_projection);
/// Leading single-scattering term; the chord integral of k rho is computed here.
cplx leading_single(ParallelCoord c, double omega, const Medium& m);

/// Chord integrals of k rho on a grid (two-point Gauss-Legendre, panels <= k_step/2).
RealSino krho_projection(const Medium& m, const SinogramGrid& grid, int threads = 0);

/// Monte-Carlo estimate with its sampling covariance.
struct McEstimate {
  cplx value;
  double var_re = 0.0;
  double var_im = 0.0;
  double cov = 0.0;

  double stderr_abs() const { return std::sqrt(var_re + var_im); }
};

/// Collision order `order` >= 2 at one line; `stream` selects the random stream.
McEstimate multiple_scattering(ParallelCoord c, double omega, int order, const Medium& m, const McBudget& budget,
                               std::uint64_t stream = 0);

/// ||k|| ||phi|| 2 pi diameter, the per-order contraction factor of the series.
double series_factor(const Medium& m);

struct SynthesisOptions {
  bool ballistic = true;
  bool single = true;
  bool leading = true;
  bool multiple = true;
  QuadPolicy quad;
  double noise_level = 0.0;
  int threads = 0;
};

/// All measurement components on one grid.
struct Synthesis {
  Sinogram data;  ///< T_1 + sum_{m=2..M} T_m (+ noise)
  ComplexSino ballistic;
  ComplexSino single;
  ComplexSino leading;
  ComplexSino multiple;
  RealSino multiple_var_re;
  RealSino multiple_var_im;
  RealSino multiple_cov;
  RealSino krho_projection;
};

Synthesis synthesize_data(const SinogramGrid& grid, double omega, const Medium& m, const McBudget& budget,
                          const SynthesisOptions& opts = {});

}  // namespace hfot
