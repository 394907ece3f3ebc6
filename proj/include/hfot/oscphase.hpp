#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "hfot/fields.hpp"
#include "hfot/geometry.hpp"
#include "hfot/xray.hpp"

namespace hfot {

using cplx = std::complex<double>;

/// One-dimensional phase on [lo, hi] with |phase''| bounded in [curv_min, curv_max].
struct Phase1D {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  double lo = -1.0;
  double hi = 1.0;
  double curv_min = 0.0;
  double curv_max = 0.0;
};

struct StationaryPhaseResult {
  cplx I;
  cplx I0;
  cplx remainder;
  /// Critical point and |phase''| there; has_critical is false when it lies outside [lo, hi].
  double X = 0.0;
  double K = 0.0;
  int sign = 0;
  bool has_critical = false;
};

/// I = int e^{i omega phase} amp over [lo, hi] (composite Gauss-Legendre,
/// >= 10 points per local wavelength) and its first-order stationary phase term.
StationaryPhaseResult stationary_phase_1d(const Phase1D& phase, const std::function<double(double)>& amp,
                                          double omega, int check_points = 2001);

/// phi_1(u, v) = |x0 - xc| - |x - x0| - |x - xc| along x = y + u theta_hat + v theta_perp.
class Phase1Model {
 public:
  Phase1Model(Vec2 y, double theta, const DiskDomain& d);

  Vec2 point(double u, double v) const;
  double value(double u, double v) const;
  /// d^2 phi_1 / dv^2; throws DomainError outside B_{r-D}.
  double second_derivative(double u, double v) const;
  /// -|x0 - xc| rho(P x)^2, the v = 0 curvature in closed form.
  double curvature_on_chord(double u) const;
  double lower_bound() const { return -2.0 / domain_.D; }
  double upper_bound() const { return -domain_.D / (4.0 * domain_.r * domain_.r); }
  const BoundaryPair& boundary() const { return bp_; }

 private:
  Vec2 y_;
  double theta_;
  DiskDomain domain_;
  BoundaryPair bp_;
};

double phi1_second_derivative(const Phase1Model& model, double u, double v);

struct Phase2Derivatives {
  double s = 0.0, t = 0.0;
  double ss = 0.0, st = 0.0, tt = 0.0;
  double det() const { return ss * tt - st * st; }
};

/// phi_2(s, theta) = |x0 - xc| - |x0 - x1| - |xc - xm| for fixed scatterers x1, xm.
class Phase2Model {
 public:
  Phase2Model(Vec2 x1, Vec2 xm, const DiskDomain& d);

  double value(ParallelCoord c) const;
  Phase2Derivatives derivatives(ParallelCoord c) const;
  double ds(ParallelCoord c) const;
  /// (u0.x0)^2/(r^2 |x1 - x0|) and (uc.xc)^2/(r^2 |xc - xm|).
  double f0(ParallelCoord c) const;
  double fc(ParallelCoord c) const;
  double g0(ParallelCoord c) const;
  double gc(ParallelCoord c) const;
  /// Hessian determinant from the g0/gc form; valid on the critical curve only.
  double det_on_curve(ParallelCoord c) const;
  double separation() const { return norm(xm_ - x1_); }
  /// arg(xm - x1).
  double theta_1m() const;
  double ss_lower_bound() const { return -8.0 * domain_.r / (domain_.D * domain_.D); }
  double ss_upper_bound() const { return -2.0 * domain_.D / (domain_.r * domain_.r); }
  Vec2 x1() const { return x1_; }
  Vec2 xm() const { return xm_; }
  const DiskDomain& domain() const { return domain_; }

 private:
  Vec2 x1_, xm_;
  DiskDomain domain_;
};

Phase2Derivatives phi2_derivatives(const Phase2Model& model, ParallelCoord c);

/// Root of d phi_2 / ds (., theta) inside [min(x1, xm).theta_perp, max(...)].
double critical_curve_sigma(const Phase2Model& model, double theta);

struct S2Profile {
  double sigma = 0.0;
  double S = 0.0;
  double dS = 0.0;
  double d2S = 0.0;
  double K2 = 0.0;
  double det = 0.0;
};
S2Profile s2_profile(const Phase2Model& model, double theta);

/// |S_2''| at the two critical angles in closed form.
double s2_curvature_closed_form(const Phase2Model& model, bool forward);

struct MarginReport {
  double separation = 0.0;
  double delta0 = 0.0;
  /// min |S_2'|/|x1 - xm| away from the critical angles, min |S_2''|/|x1 - xm| near them.
  double C1 = 0.0;
  double C2 = 0.0;
  double C2_candidate = 0.0;
  bool C2_candidate_holds = false;
  int outer_samples = 0;
  int inner_samples = 0;
};
MarginReport lemma_S_margins(const Phase2Model& model, double delta0, int sample_count);

/// Resolution of the (s, theta) quadrature in beta_kernel.
struct BetaQuadrature {
  double points_per_wavelength = 10.0;
  int order = 8;
};

/// beta^omega(y, x1, x2, x_{m-1}, xm) by direct quadrature over the line set.
cplx beta_kernel(Vec2 y, Vec2 x1, Vec2 x2, Vec2 xm1, Vec2 xm, double omega, const FilterSpec& spec,
                 const ScalarField& sigma, const PhaseFunction& phi, const DiskDomain& d,
                 const BetaQuadrature& quad = {}, int threads = 0);

}  // namespace hfot
