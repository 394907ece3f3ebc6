#include "hfot/geometry.hpp"

#include <cmath>
#include <string>

#include "hfot/errors.hpp"
#include "hfot/quadrature.hpp"

namespace hfot {

DiskDomain::DiskDomain(double radius, double standoff) : r(radius), D(standoff) {
  if (!(r > 0.0) || !(D > 0.0) || !(D < 0.5 * r))
    throw ConfigError("disk domain requires 0 < D < r/2 (r=" + std::to_string(r) + ", D=" + std::to_string(D) + ")");
}

BoundaryPair boundary_points(ParallelCoord c, const DiskDomain& d) {
  if (!(std::abs(c.s) < d.r)) throw DomainError("boundary_points: |s| must be < r");
  const double q = std::sqrt(d.r * d.r - c.s * c.s);
  const Vec2 th = direction(c.theta);
  const Vec2 tp = normal_direction(c.theta);
  BoundaryPair b;
  b.x0 = c.s * tp - q * th;
  b.xc = c.s * tp + q * th;
  b.e0 = th;
  b.d0 = 2.0 * q;
  return b;
}

double chi(double s, const DiskDomain& d) {
  const double a = std::abs(s);
  const double lo = d.r - 2.0 * d.D;
  const double hi = d.r - d.D;
  if (a <= lo) return 1.0;
  if (a >= hi) return 0.0;
  const double t = (hi - a) / (hi - lo);
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

BoundaryJacobians boundary_jacobians(ParallelCoord c, const DiskDomain& d) {
  if (!(std::abs(c.s) < d.r - 0.5 * d.D)) throw DomainError("boundary_jacobians: |s| must be < r - D/2");
  const double r2 = d.r * d.r;
  const double q = std::sqrt(r2 - c.s * c.s);
  const Vec2 th = direction(c.theta);
  const Vec2 tp = normal_direction(c.theta);
  const Vec2 x0 = c.s * tp - q * th;
  const Vec2 xc = c.s * tp + q * th;
  const double ratio = c.s / q;

  BoundaryJacobians j;
  j.x0_s = tp + ratio * th;
  j.xc_s = tp - ratio * th;
  j.x0_t = -q * j.x0_s;
  j.xc_t = q * j.xc_s;
  const double curv = r2 / (q * q * q);
  j.x0_ss = curv * th;
  j.xc_ss = -curv * th;
  j.x0_tt = -x0;
  j.xc_tt = -xc;
  j.x0_st = x0 / q;
  j.xc_st = -xc / q;
  return j;
}

double wrap_angle(double t) {
  const double two_pi = 2.0 * kPi;
  double w = std::fmod(t, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w -= two_pi;
  return w;
}

double angle_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return d > kPi ? 2.0 * kPi - d : d;
}

SinogramGrid::SinogramGrid(int ns, int ntheta, const DiskDomain& d) : n_s(ns), n_theta(ntheta), s_max(d.s_max()) {
  if (ns < 1 || ntheta < 1) throw ConfigError("sinogram grid needs positive sizes");
}

double SinogramGrid::dtheta() const { return 2.0 * kPi / n_theta; }

ParallelCoord SinogramGrid::coord(std::size_t idx) const {
  const int i = static_cast<int>(idx / static_cast<std::size_t>(n_theta));
  const int j = static_cast<int>(idx % static_cast<std::size_t>(n_theta));
  return {s(i), theta(j)};
}

}  // namespace hfot
