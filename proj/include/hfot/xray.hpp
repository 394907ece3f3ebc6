#pragma once

#include <string>

#include "hfot/fields.hpp"
#include "hfot/sinogram.hpp"

namespace hfot {

enum class FilterProfile {
  RaisedCosine,  ///< 1 on [0, 1/2], cos^2(pi (t - 1/2)) on [1/2, 1]
  Ideal,         ///< indicator of [0, 1]
};

/// Low-pass profile and bandwidth defining the ramp filter w_b and the mollifier W_b.
struct FilterSpec {
  FilterProfile profile = FilterProfile::RaisedCosine;
  double b = 8.0;
  /// Gauss-Legendre order per panel for the radial mollifier integral.
  int quad_order = 16;

  double profile_value(double t) const;
  std::string profile_name() const;
  static FilterProfile parse_profile(const std::string& name);
};

/// w_b(u) = (1/(8 pi^2)) int e^{i sigma u} |sigma| profile(|sigma|/b) d sigma, in closed form.
double filter_w(double u, const FilterSpec& spec);
/// ||w_1||_{L^1(R)} for the spec's profile.
double filter_w1_l1(const FilterSpec& spec);

/// Radial profile of W_b, normalised so that int W_b = profile(0) = 1.
double mollifier_W_radial(double radius, const FilterSpec& spec);
double mollifier_W(Vec2 x, const FilterSpec& spec);
/// ||W_b||_{L^1(R^2)} by radial quadrature.
double mollifier_W_l1(const FilterSpec& spec);

/// X-ray transform of an evaluator supported in the disk of radius `support`,
/// composite two-point Gauss-Legendre along each chord with panels <= step.
RealSino radon(const FieldFn& f, const SinogramGrid& grid, double support, double step, int threads = 0);
/// Gridded field: step h/2 over the field's support radius.
RealSino radon(const ScalarField& f, const SinogramGrid& grid, int threads = 0);

/// Backprojection value at a point: trapezoid in theta, linear in s, zero for |s| > r - D.
double backproject_at(const RealSino& g, Vec2 x);
ScalarField backproject(const RealSino& g, const Lattice& out, int threads = 0);

enum class FbpMode {
  Interpolated,  ///< filter on an oversampled s grid, then linear interpolation
  Exact,         ///< filter evaluated at x.theta_perp for every output node
};

/// P^{-1,b}[g] = backprojection of (w_b convolved in s with g).
ScalarField fbp(const RealSino& g, const FilterSpec& spec, const Lattice& out, FbpMode mode = FbpMode::Interpolated,
                int threads = 0);
/// Same operator evaluated through the ramp-filtered spectrum of each projection.
ScalarField fbp_fourier(const RealSino& g, const FilterSpec& spec, const Lattice& out, int threads = 0);
/// Variance of the FBP output for independent per-sample variances.
ScalarField fbp_variance(const RealSino& var, const FilterSpec& spec, const Lattice& out, int threads = 0);

/// W_b convolved with the lattice samples of f (lattice Riemann sum, via FFT).
ScalarField lowpass_reference(const ScalarField& f, const FilterSpec& spec);

}  // namespace hfot
