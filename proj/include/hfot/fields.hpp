#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hfot/geometry.hpp"
#include "hfot/vec2.hpp"

namespace hfot {

/// Node lattice over [-r, r]^2 with n cells per axis: x_i = -r + i h, h = 2r/n,
/// i = 0..n. Values are stored row by row (y outer).
struct Lattice {
  int n = 0;
  double r = 1.0;

  Lattice() = default;
  Lattice(int cells, double radius);

  double h() const { return 2.0 * r / n; }
  int nodes() const { return n + 1; }
  std::size_t size() const { return static_cast<std::size_t>(nodes()) * static_cast<std::size_t>(nodes()); }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nodes()) + static_cast<std::size_t>(ix);
  }
  double coord(int i) const { return -r + i * h(); }
  Vec2 node(int ix, int iy) const { return {coord(ix), coord(iy)}; }
  Vec2 node(std::size_t idx) const;
};

/// Point evaluator used wherever a coefficient may be analytic or gridded.
using FieldFn = std::function<double(Vec2)>;

/// Real samples on a lattice with bilinear interpolation between nodes.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Lattice& lattice, double fill = 0.0);

  static ScalarField constant(const Lattice& lattice, double value);

  /// Samples fn at every node.
  static ScalarField sample(const Lattice& lattice, const FieldFn& fn, double support_radius);

  /// Bilinear interpolation; points outside the lattice are clamped to its edge.
  double operator()(Vec2 x) const;

  const Lattice& lattice() const { return lattice_; }
  double at(int ix, int iy) const { return values_[lattice_.index(ix, iy)]; }
  const std::vector<double>& values() const { return values_; }
  /// Mutable access drops the constant-field shortcut.
  std::vector<double>& values() {
    constant_ = false;
    return values_;
  }

  double support_radius() const { return support_radius_; }
  void set_support_radius(double rad) { support_radius_ = rad; }

  bool is_constant() const { return constant_; }
  double constant_value() const { return constant_value_; }

  double max_abs() const;

 private:
  Lattice lattice_;
  std::vector<double> values_;
  double support_radius_ = 0.0;
  bool constant_ = false;
  double constant_value_ = 0.0;
};

/// sup |a - b| over lattice nodes inside the disk of radius `within`.
double sup_diff(const ScalarField& a, const ScalarField& b, double within);
/// sup |a| over lattice nodes inside the disk of radius `within`.
double sup_norm(const ScalarField& a, double within);

/// Scattering phase function phi(incoming, outgoing) on the unit circle.
class PhaseFunction {
 public:
  enum class Kind { Isotropic, TruncatedCosine };

  static PhaseFunction isotropic();
  /// (1 - g)/(2 pi) + g max(0, v'.v)/2, forward-peaked for g > 0.
  static PhaseFunction truncated_cosine(double g);

  double operator()(Vec2 incoming, Vec2 outgoing) const;
  double sup_norm() const;
  /// min over directions of phi(v, v).
  double forward_value() const;
  Kind kind() const { return kind_; }
  double anisotropy() const { return g_; }
  std::string name() const;

 private:
  Kind kind_ = Kind::Isotropic;
  double g_ = 0.0;
};

/// (r^2 - |x|^2)^{-1/2}.
double rho_weight(Vec2 x, double r);

/// Straight-line attenuation factors through a gridded extinction field.
class Attenuator {
 public:
  explicit Attenuator(const ScalarField& sigma, int min_panels = 2);

  /// Line integral of sigma along [x, y] with the given panel count (4-point
  /// Gauss-Legendre per panel); panels <= 0 selects panels no longer than h.
  double optical_depth(Vec2 x, Vec2 y, int panels = 0) const;
  /// E(x, y) = exp(-optical_depth).
  double operator()(Vec2 x, Vec2 y) const { return std::exp(-optical_depth(x, y)); }
  bool is_constant() const { return constant_; }
  double constant_value() const { return value_; }

 private:
  const ScalarField* sigma_;
  int min_panels_;
  bool constant_;
  double value_;
};

/// E(x, y) with n_quad Gauss-Legendre panels; rejects points outside the disk.
double attenuation(Vec2 x, Vec2 y, const ScalarField& sigma, int n_quad);
/// E(x0, x) E(x, xc).
double attenuation_path(Vec2 x0, Vec2 x, Vec2 xc, const ScalarField& sigma, int n_quad = 0);
/// Line integral of sigma over the chord of (s, theta); equals -log E(x0, xc).
double radon_sigma(ParallelCoord c, const ScalarField& sigma, const DiskDomain& d);

/// One analytic phantom component.
struct PhantomComponent {
  std::string kind = "bump";  // bump | gaussian | disk | ring
  Vec2 center;
  double radius = 0.2;  // support radius (bump, disk), ring radius (ring)
  double width = 0.1;   // standard deviation (gaussian), half width (ring)
  double amplitude = 0.1;
};

struct PhantomSpec {
  std::vector<PhantomComponent> components;
  /// When positive, rescale so that sup k rho equals this value.
  double krho_max = 0.0;
};

/// Analytic scattering coefficient built from smooth or piecewise components.
class Phantom {
 public:
  Phantom() = default;
  Phantom(const PhantomSpec& spec, const DiskDomain& domain);

  double operator()(Vec2 x) const;
  /// Radius of a centred disk containing the support.
  double support_radius() const { return support_radius_; }
  double scale() const { return scale_; }
  const PhantomSpec& spec() const { return spec_; }
  bool empty() const { return spec_.components.empty(); }

 private:
  double raw(Vec2 x) const;

  PhantomSpec spec_;
  DiskDomain domain_;
  double scale_ = 1.0;
  double support_radius_ = 0.0;
};

ScalarField make_phantom(const PhantomSpec& spec, const DiskDomain& d, const Lattice& lattice);

}  // namespace hfot
