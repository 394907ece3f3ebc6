#include "hfot/fields.hpp"

#include <algorithm>
#include <cmath>

#include "hfot/errors.hpp"
#include "hfot/quadrature.hpp"

namespace hfot {

Lattice::Lattice(int cells, double radius) : n(cells), r(radius) {
  if (cells < 2) throw ConfigError("lattice needs at least 2 cells per axis");
  if (!(radius > 0.0)) throw ConfigError("lattice radius must be positive");
}

Vec2 Lattice::node(std::size_t idx) const {
  const auto nn = static_cast<std::size_t>(nodes());
  return node(static_cast<int>(idx % nn), static_cast<int>(idx / nn));
}

ScalarField::ScalarField(const Lattice& lattice, double fill)
    : lattice_(lattice), values_(lattice.size(), fill), support_radius_(lattice.r) {}

ScalarField ScalarField::constant(const Lattice& lattice, double value) {
  ScalarField f(lattice, value);
  f.constant_ = true;
  f.constant_value_ = value;
  return f;
}

ScalarField ScalarField::sample(const Lattice& lattice, const FieldFn& fn, double support_radius) {
  ScalarField f(lattice, 0.0);
  for (std::size_t k = 0; k < f.values_.size(); ++k) f.values_[k] = fn(lattice.node(k));
  f.support_radius_ = support_radius;
  return f;
}

double ScalarField::operator()(Vec2 x) const {
  if (constant_) return constant_value_;
  const int n = lattice_.n;
  const double inv_h = 1.0 / lattice_.h();
  const double fx = std::clamp((x.x + lattice_.r) * inv_h, 0.0, static_cast<double>(n));
  const double fy = std::clamp((x.y + lattice_.r) * inv_h, 0.0, static_cast<double>(n));
  const int ix = std::min(static_cast<int>(fx), n - 1);
  const int iy = std::min(static_cast<int>(fy), n - 1);
  const double tx = fx - ix;
  const double ty = fy - iy;
  const std::size_t row = static_cast<std::size_t>(lattice_.nodes());
  const std::size_t k = lattice_.index(ix, iy);
  const double v00 = values_[k], v10 = values_[k + 1];
  const double v01 = values_[k + row], v11 = values_[k + row + 1];
  return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double sup_diff(const ScalarField& a, const ScalarField& b, double within) {
  if (a.lattice().n != b.lattice().n || a.lattice().r != b.lattice().r)
    throw DomainError("sup_diff: lattices differ");
  double m = 0.0;
  const double w2 = within * within * (1.0 + 1e-12);
  for (std::size_t k = 0; k < a.values().size(); ++k)
    if (norm2(a.lattice().node(k)) <= w2) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

double sup_norm(const ScalarField& a, double within) {
  double m = 0.0;
  const double w2 = within * within * (1.0 + 1e-12);
  for (std::size_t k = 0; k < a.values().size(); ++k)
    if (norm2(a.lattice().node(k)) <= w2) m = std::max(m, std::abs(a.values()[k]));
  return m;
}

PhaseFunction PhaseFunction::isotropic() { return PhaseFunction{}; }

PhaseFunction PhaseFunction::truncated_cosine(double g) {
  if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("truncated-cosine anisotropy must lie in [0, 1]");
  PhaseFunction p;
  p.kind_ = Kind::TruncatedCosine;
  p.g_ = g;
  return p;
}

double PhaseFunction::operator()(Vec2 incoming, Vec2 outgoing) const {
  const double iso = 1.0 / (2.0 * kPi);
  if (kind_ == Kind::Isotropic) return iso;
  return (1.0 - g_) * iso + 0.5 * g_ * std::max(0.0, dot(incoming, outgoing));
}

double PhaseFunction::sup_norm() const {
  const double iso = 1.0 / (2.0 * kPi);
  return kind_ == Kind::Isotropic ? iso : (1.0 - g_) * iso + 0.5 * g_;
}

double PhaseFunction::forward_value() const { return sup_norm(); }

std::string PhaseFunction::name() const { return kind_ == Kind::Isotropic ? "isotropic" : "truncated_cosine"; }

double rho_weight(Vec2 x, double r) {
  const double q = r * r - norm2(x);
  if (!(q > 0.0)) throw DomainError("rho_weight: point not inside the disk");
  return 1.0 / std::sqrt(q);
}

Attenuator::Attenuator(const ScalarField& sigma, int min_panels)
    : sigma_(&sigma), min_panels_(std::max(1, min_panels)), constant_(sigma.is_constant()), value_(sigma.constant_value()) {}

double Attenuator::optical_depth(Vec2 x, Vec2 y, int panels) const {
  const Vec2 dxy = y - x;
  const double len = norm(dxy);
  if (len == 0.0) return 0.0;
  if (constant_) return value_ * len;
  const int p = panels > 0 ? panels : std::max(min_panels_, static_cast<int>(std::ceil(len / sigma_->lattice().h())));
  const Vec2 u = dxy / len;
  const ScalarField& s = *sigma_;
  return integrate_gl([&](double t) { return s(x + t * u); }, 0.0, len, p, 4);
}

namespace {

void check_in_disk(Vec2 x, double r, const char* who) {
  if (norm(x) > r * (1.0 + 1e-12)) throw DomainError(std::string(who) + ": point outside the closed disk");
}

}  // namespace

double attenuation(Vec2 x, Vec2 y, const ScalarField& sigma, int n_quad) {
  const double r = sigma.lattice().r;
  check_in_disk(x, r, "attenuation");
  check_in_disk(y, r, "attenuation");
  if (n_quad < 2) throw DomainError("attenuation: n_quad must be >= 2");
  if (sigma.is_constant()) return std::exp(-sigma.constant_value() * norm(y - x));
  return std::exp(-Attenuator(sigma).optical_depth(x, y, n_quad));
}

double attenuation_path(Vec2 x0, Vec2 x, Vec2 xc, const ScalarField& sigma, int n_quad) {
  const double r = sigma.lattice().r;
  check_in_disk(x0, r, "attenuation_path");
  check_in_disk(x, r, "attenuation_path");
  check_in_disk(xc, r, "attenuation_path");
  Attenuator att(sigma);
  return std::exp(-att.optical_depth(x0, x, n_quad)) * std::exp(-att.optical_depth(x, xc, n_quad));
}

double radon_sigma(ParallelCoord c, const ScalarField& sigma, const DiskDomain& d) {
  const BoundaryPair b = boundary_points(c, d);
  return Attenuator(sigma).optical_depth(b.x0, b.xc);
}

namespace {

double smooth_bump(double t) {
  // exp(1 - 1/(1 - t)) for t in [0, 1), zero beyond; peak value 1 at t = 0.
  if (t >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t));
}

double component_extent(const PhantomComponent& c, const DiskDomain& d) {
  if (c.kind == "bump" || c.kind == "disk") return norm(c.center) + c.radius;
  if (c.kind == "ring") return norm(c.center) + c.radius + c.width;
  if (c.kind == "gaussian") return d.support_radius();
  throw ConfigError("unknown phantom component kind '" + c.kind + "'");
}

}  // namespace

Phantom::Phantom(const PhantomSpec& spec, const DiskDomain& domain) : spec_(spec), domain_(domain) {
  const double limit = domain.support_radius();
  for (const auto& c : spec_.components) {
    if (!std::isfinite(c.amplitude)) throw ConfigError("phantom amplitude must be finite");
    if (c.kind != "gaussian" && !(c.radius > 0.0)) throw ConfigError("phantom radius must be positive");
    if ((c.kind == "gaussian" || c.kind == "ring") && !(c.width > 0.0)) throw ConfigError("phantom width must be positive");
    const double ext = component_extent(c, domain);
    if (c.kind == "gaussian" && norm(c.center) >= limit)
      throw ConfigError("gaussian phantom centre must lie inside B_{r-2D}");
    if (ext > limit * (1.0 + 1e-12))
      throw ConfigError("phantom component '" + c.kind + "' leaves the admissible support disk");
    support_radius_ = std::max(support_radius_, std::min(ext, limit));
  }
  if (spec_.krho_max > 0.0 && !spec_.components.empty()) {
    // Dense sampling of k rho; component centres are included since bumps peak there.
    double peak = 0.0;
    const int m = 400;
    const double R = support_radius_;
    for (int iy = 0; iy <= m; ++iy)
      for (int ix = 0; ix <= m; ++ix) {
        const Vec2 x{-R + 2.0 * R * ix / m, -R + 2.0 * R * iy / m};
        if (norm(x) < domain_.r) peak = std::max(peak, std::abs(raw(x)) * rho_weight(x, domain_.r));
      }
    for (const auto& c : spec_.components)
      peak = std::max(peak, std::abs(raw(c.center)) * rho_weight(c.center, domain_.r));
    if (peak > 0.0) scale_ = spec_.krho_max / peak;
  }
}

double Phantom::raw(Vec2 x) const {
  double v = 0.0;
  const double limit = domain_.support_radius();
  for (const auto& c : spec_.components) {
    const double d2 = norm2(x - c.center);
    if (c.kind == "bump") {
      v += c.amplitude * smooth_bump(d2 / (c.radius * c.radius));
    } else if (c.kind == "disk") {
      if (d2 < c.radius * c.radius) v += c.amplitude;
    } else if (c.kind == "ring") {
      const double u = (std::sqrt(d2) - c.radius) / c.width;
      v += c.amplitude * smooth_bump(u * u);
    } else if (c.kind == "gaussian") {
      if (norm2(x) < limit * limit) v += c.amplitude * std::exp(-d2 / (2.0 * c.width * c.width));
    }
  }
  return v;
}

double Phantom::operator()(Vec2 x) const { return scale_ * raw(x); }

ScalarField make_phantom(const PhantomSpec& spec, const DiskDomain& d, const Lattice& lattice) {
  const Phantom p(spec, d);
  return ScalarField::sample(lattice, [&](Vec2 x) { return p(x); }, p.support_radius());
}

}  // namespace hfot
