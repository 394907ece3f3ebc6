#include "hfot/oscphase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hfot/errors.hpp"
#include "hfot/inversion.hpp"
#include "hfot/parallel.hpp"
#include "hfot/quadrature.hpp"

namespace hfot {

StationaryPhaseResult stationary_phase_1d(const Phase1D& phase, const std::function<double(double)>& amp,
                                          double omega, int check_points) {
  if (!(omega > 0.0)) throw DomainError("stationary_phase_1d: omega must be positive");
  if (!(phase.hi > phase.lo)) throw DomainError("stationary_phase_1d: empty interval");
  if (!(phase.curv_min > 0.0) || !(phase.curv_max >= phase.curv_min))
    throw DomainError("stationary_phase_1d: need 0 < curv_min <= curv_max");

  const double lo = phase.lo, hi = phase.hi;
  int sign = 0;
  const int n_check = std::max(check_points, 2);
  for (int k = 0; k < n_check; ++k) {
    const double x = lo + (hi - lo) * k / (n_check - 1);
    if (amp(x) == 0.0) continue;
    const double c = phase.d2(x);
    const double a = std::abs(c);
    if (a < phase.curv_min * (1.0 - 1e-12) || a > phase.curv_max * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "stationary_phase_1d: |phase''(" << x << ")| = " << a << " outside [" << phase.curv_min << ", "
          << phase.curv_max << "]";
      throw PreconditionError(msg.str());
    }
    const int sg = c > 0.0 ? 1 : -1;
    if (sign != 0 && sg != sign) throw PreconditionError("stationary_phase_1d: phase'' changes sign");
    sign = sg;
  }

  StationaryPhaseResult res;
  const double slope = std::max({std::abs(phase.d1(lo)), std::abs(phase.d1(hi)), 1e-300});
  const double wavelength = 2.0 * kPi / (omega * slope);
  const int order = 16;
  // 16 nodes per panel, one panel per wavelength at most.
  const int panels = std::max(64, static_cast<int>(std::ceil((hi - lo) / wavelength)));
  res.I = integrate_gl(
      [&](double x) {
        const double f = amp(x);
        return f == 0.0 ? cplx(0.0) : f * std::polar(1.0, omega * phase.value(x));
      },
      lo, hi, panels, order);

  double a = lo, b = hi;
  double fa = phase.d1(a), fb = phase.d1(b);
  if (fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0)) {
    res.has_critical = true;
    double x;
    if (fa == 0.0) {
      x = a;
    } else if (fb == 0.0) {
      x = b;
    } else {
      for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b) + 1.0);
           ++it) {
        const double m = 0.5 * (a + b);
        const double fm = phase.d1(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      x = 0.5 * (a + b);
      for (int it = 0; it < 2; ++it) {
        const double step = phase.d1(x) / phase.d2(x);
        const double nx = x - step;
        if (nx >= lo && nx <= hi) x = nx;
      }
    }
    res.X = x;
    const double c = phase.d2(x);
    res.K = std::abs(c);
    res.sign = c > 0.0 ? 1 : -1;
    const double f = amp(x);
    res.I0 = std::polar(std::sqrt(2.0 * kPi / (omega * res.K)), res.sign * 0.25 * kPi + omega * phase.value(x)) * f;
  } else {
    res.sign = sign;
    res.I0 = 0.0;
  }
  res.remainder = res.I - res.I0;
  return res;
}

Phase1Model::Phase1Model(Vec2 y, double theta, const DiskDomain& d)
    : y_(y), theta_(theta), domain_(d), bp_(boundary_points({dot(y, normal_direction(theta)), theta}, d)) {}

Vec2 Phase1Model::point(double u, double v) const {
  return y_ + u * direction(theta_) + v * normal_direction(theta_);
}

double Phase1Model::value(double u, double v) const {
  const Vec2 x = point(u, v);
  return norm(bp_.xc - bp_.x0) - norm(x - bp_.x0) - norm(x - bp_.xc);
}

double Phase1Model::second_derivative(double u, double v) const {
  const Vec2 x = point(u, v);
  if (norm(x) > domain_.s_max()) throw DomainError("phi1_second_derivative: point outside B_{r-D}");
  const Vec2 px = y_ + u * direction(theta_);
  const double a = norm2(px - bp_.x0), b = norm2(px - bp_.xc);
  const double da = norm(x - bp_.x0), dc = norm(x - bp_.xc);
  return -(a / (da * da * da) + b / (dc * dc * dc));
}

double Phase1Model::curvature_on_chord(double u) const {
  const double rho = rho_weight(y_ + u * direction(theta_), domain_.r);
  return -bp_.d0 * rho * rho;
}

double phi1_second_derivative(const Phase1Model& model, double u, double v) { return model.second_derivative(u, v); }

Phase2Model::Phase2Model(Vec2 x1, Vec2 xm, const DiskDomain& d) : x1_(x1), xm_(xm), domain_(d) {}

double Phase2Model::value(ParallelCoord c) const {
  const BoundaryPair bp = boundary_points(c, domain_);
  return bp.d0 - norm(bp.x0 - x1_) - norm(bp.xc - xm_);
}

namespace {

struct Phase2Frame {
  double q;
  Vec2 th, x0, xc, u0, uc, n0, nc;
  double l0, lc;
};

Phase2Frame frame(ParallelCoord c, const DiskDomain& d, Vec2 x1, Vec2 xm) {
  if (!(std::abs(c.s) < d.r)) throw DomainError("phase2: |s| must be < r");
  Phase2Frame f;
  const double r = d.r;
  f.q = std::sqrt(r * r - c.s * c.s);
  f.th = direction(c.theta);
  const Vec2 tp = normal_direction(c.theta);
  f.x0 = c.s * tp - f.q * f.th;
  f.xc = c.s * tp + f.q * f.th;
  f.l0 = norm(f.x0 - x1);
  f.lc = norm(f.xc - xm);
  f.u0 = (f.x0 - x1) / f.l0;
  f.uc = (f.xc - xm) / f.lc;
  f.n0 = (f.q * tp + c.s * f.th) / r;
  f.nc = (f.q * tp - c.s * f.th) / r;
  return f;
}

}  // namespace

double Phase2Model::ds(ParallelCoord c) const {
  const Phase2Frame f = frame(c, domain_, x1_, xm_);
  const double r = domain_.r;
  return -(r / f.q) * (2.0 * c.s / r + dot(f.u0, f.n0) + dot(f.uc, f.nc));
}

double Phase2Model::f0(ParallelCoord c) const {
  const Phase2Frame f = frame(c, domain_, x1_, xm_);
  const double p = dot(f.u0, f.x0);
  return p * p / (domain_.r * domain_.r * f.l0);
}

double Phase2Model::fc(ParallelCoord c) const {
  const Phase2Frame f = frame(c, domain_, x1_, xm_);
  const double p = dot(f.uc, f.xc);
  return p * p / (domain_.r * domain_.r * f.lc);
}

double Phase2Model::g0(ParallelCoord c) const {
  const Phase2Frame f = frame(c, domain_, x1_, xm_);
  return -dot(f.u0, f.x0) * dot(f.u0, x1_) / f.l0;
}

double Phase2Model::gc(ParallelCoord c) const {
  const Phase2Frame f = frame(c, domain_, x1_, xm_);
  return -dot(f.uc, f.xc) * dot(f.uc, xm_) / f.lc;
}

Phase2Derivatives Phase2Model::derivatives(ParallelCoord c) const {
  const Phase2Frame f = frame(c, domain_, x1_, xm_);
  const double r = domain_.r, r2 = r * r;
  const double p0 = dot(f.u0, f.x0), pc = dot(f.uc, f.xc);
  const double F0 = p0 * p0 / (r2 * f.l0);
  const double Fc = pc * pc / (r2 * f.lc);
  Phase2Derivatives out;
  out.s = -(r / f.q) * (2.0 * c.s / r + dot(f.u0, f.n0) + dot(f.uc, f.nc));
  out.t = r * (dot(f.u0, f.n0) - dot(f.uc, f.nc));
  out.ss = -r2 / (f.q * f.q * f.q) * (2.0 + dot(f.u0 - f.uc, f.th) + f.q * (F0 + Fc));
  out.st = (-p0 + pc + r2 * (F0 - Fc)) / f.q;
  out.tt = p0 + pc - r2 * (F0 + Fc);
  return out;
}

double Phase2Model::det_on_curve(ParallelCoord c) const {
  const double q = std::sqrt(domain_.r * domain_.r - c.s * c.s);
  const double a = 2.0 * g0(c) / q - 1.0;
  const double b = 2.0 * gc(c) / q - 1.0;
  return a * b - 1.0;
}

double Phase2Model::theta_1m() const {
  const Vec2 d = xm_ - x1_;
  return wrap_angle(std::atan2(d.y, d.x));
}

Phase2Derivatives phi2_derivatives(const Phase2Model& model, ParallelCoord c) { return model.derivatives(c); }

double critical_curve_sigma(const Phase2Model& model, double theta) {
  const Vec2 tp = normal_direction(theta);
  const double p1 = dot(model.x1(), tp), pm = dot(model.xm(), tp);
  if (p1 == pm) return p1;
  double a = std::min(p1, pm), b = std::max(p1, pm);
  double fa = model.ds({a, theta});
  const double fb = model.ds({b, theta});
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    // Rounding can hide the sign change when the bracket collapses.
    if (b - a <= 1e-12 * (1.0 + std::abs(a))) return std::abs(fa) <= std::abs(fb) ? a : b;
    std::ostringstream msg;
    msg.precision(17);
    msg << "critical_curve_sigma: bracket [" << a << ", " << b << "] does not straddle the root (" << fa << ", " << fb
        << ") theta=" << theta;
    throw std::logic_error(msg.str());
  }
  for (int it = 0; it < 200 && b - a > 2.0 * std::numeric_limits<double>::epsilon(); ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = model.ds({m, theta});
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  double s = 0.5 * (a + b);
  const double lo = std::min(p1, pm), hi = std::max(p1, pm);
  for (int it = 0; it < 2; ++it) {
    const Phase2Derivatives dv = model.derivatives({s, theta});
    const double ns = s - dv.s / dv.ss;
    if (ns >= lo && ns <= hi && std::abs(model.ds({ns, theta})) <= std::abs(dv.s)) s = ns;
  }
  return s;
}

S2Profile s2_profile(const Phase2Model& model, double theta) {
  S2Profile p;
  p.sigma = critical_curve_sigma(model, theta);
  const ParallelCoord c{p.sigma, theta};
  p.S = model.value(c);
  const Phase2Derivatives dv = model.derivatives(c);
  p.dS = dv.t;
  p.K2 = -dv.ss;
  p.det = model.det_on_curve(c);
  p.d2S = -p.det / p.K2;
  return p;
}

double s2_curvature_closed_form(const Phase2Model& model, bool forward) {
  const double theta = forward ? model.theta_1m() : wrap_angle(model.theta_1m() + kPi);
  const double sigma = dot(model.x1(), normal_direction(theta));
  const BoundaryPair bp = boundary_points({sigma, theta}, model.domain());
  const double value =
      model.separation() * bp.d0 / (norm(model.x1() - bp.x0) + norm(bp.xc - model.xm()));
  return forward ? -value : value;
}

MarginReport lemma_S_margins(const Phase2Model& model, double delta0, int sample_count) {
  MarginReport rep;
  rep.separation = model.separation();
  rep.delta0 = delta0;
  rep.C2_candidate = 0.125 * std::sqrt(2.0 * model.domain().D / model.domain().r);
  if (sample_count <= 0 || rep.separation == 0.0) return rep;
  const double tc[2] = {model.theta_1m(), wrap_angle(model.theta_1m() + kPi)};
  double c1 = std::numeric_limits<double>::infinity();
  double c2 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < sample_count; ++k) {
    const double theta = 2.0 * kPi * (k + 0.5) / sample_count;
    const double dist = std::min(angle_distance(theta, tc[0]), angle_distance(theta, tc[1]));
    const bool outer = dist >= 0.5 * delta0;
    const bool inner = dist <= delta0;
    if (!outer && !inner) continue;
    const S2Profile p = s2_profile(model, theta);
    if (outer) {
      c1 = std::min(c1, std::abs(p.dS) / rep.separation);
      ++rep.outer_samples;
    }
    if (inner) {
      c2 = std::min(c2, std::abs(p.d2S) / rep.separation);
      ++rep.inner_samples;
    }
  }
  rep.C1 = rep.outer_samples > 0 ? c1 : 0.0;
  rep.C2 = rep.inner_samples > 0 ? c2 : 0.0;
  rep.C2_candidate_holds = rep.C2 >= rep.C2_candidate;
  return rep;
}

cplx beta_kernel(Vec2 y, Vec2 x1, Vec2 x2, Vec2 xm1, Vec2 xm, double omega, const FilterSpec& spec,
                 const ScalarField& sigma, const PhaseFunction& phi, const DiskDomain& d, const BetaQuadrature& quad,
                 int threads) {
  const double lim = d.s_max();
  for (Vec2 p : {y, x1, x2, xm1, xm})
    if (norm(p) > lim) throw DomainError("beta_kernel: points must lie in B_{r-D}");
  if (!(omega > 0.0)) throw DomainError("beta_kernel: omega must be positive");
  if (!(quad.points_per_wavelength >= 10.0) || quad.order < 2)
    throw PreconditionError("beta_kernel: resolution below 10 points per wavelength");

  const double r = d.r;
  const double qmin = std::sqrt(r * r - lim * lim);
  const double slope_s = (r / qmin) * (2.0 * lim / r + 2.0);
  const double slope_t = 2.0 * r;
  const double pts = quad.points_per_wavelength;
  const int order = quad.order;
  const double ds_panel = std::min(order * 2.0 * kPi / (pts * omega * slope_s), 0.25 / spec.b);
  const int s_panels = std::max(8, static_cast<int>(std::ceil(2.0 * lim / ds_panel)));

  // Theta breakpoints: uniform at the wavelength scale, refined near the critical angles.
  std::vector<double> breaks;
  const double dt_base = order * 2.0 * kPi / (pts * omega * slope_t);
  const Phase2Model model(x1, xm, d);
  const double sep = model.separation();
  const double width = sep > 0.0 ? 1.0 / std::sqrt(omega * sep) : 0.0;
  const double tc[2] = {model.theta_1m(), wrap_angle(model.theta_1m() + kPi)};
  {
    double t = 0.0;
    breaks.push_back(t);
    while (t < 2.0 * kPi) {
      double step = dt_base;
      if (width > 0.0) {
        const double dist = std::min(angle_distance(t, tc[0]), angle_distance(t, tc[1]));
        if (dist < 4.0 * width) step = std::min(step, 0.25 * width);
      }
      t = std::min(2.0 * kPi, t + step);
      breaks.push_back(t);
    }
  }

  const Attenuator att(sigma);
  const GaussRule& rule = gauss_legendre(order);
  const std::size_t n_panels = breaks.size() - 1;
  std::vector<cplx> partial(n_panels);
  parallel_for(n_panels, threads, [&](std::size_t p) {
    const double t0 = breaks[p], t1 = breaks[p + 1];
    cplx panel_sum = 0.0;
    for (std::size_t kt = 0; kt < rule.nodes.size(); ++kt) {
      const double theta = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * rule.nodes[kt];
      const double yp = dot(y, normal_direction(theta));
      cplx line = 0.0;
      for (int ps = 0; ps < s_panels; ++ps) {
        const double a = -lim + 2.0 * lim * ps / s_panels;
        const double b = -lim + 2.0 * lim * (ps + 1) / s_panels;
        cplx part = 0.0;
        for (std::size_t ks = 0; ks < rule.nodes.size(); ++ks) {
          const double s = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[ks];
          const double cut = chi(s, d);
          if (cut == 0.0) continue;
          const double w = filter_w(yp - s, spec);
          if (w == 0.0) continue;
          const ParallelCoord c{s, theta};
          const BoundaryPair bp = boundary_points(c, d);
          const double l0 = norm(x1 - bp.x0), lc = norm(bp.xc - xm);
          const Vec2 v01 = (x1 - bp.x0) / l0;
          const Vec2 vmc = (bp.xc - xm) / lc;
          const double geo = att(bp.x0, x1) * att(xm, bp.xc) / (l0 * lc) * std::abs(dot(bp.x0, v01) / r) *
                             std::abs(dot(bp.xc, vmc) / r) * phi(v01, unit(x2 - x1)) * phi(unit(xm - xm1), vmc);
          // Unit-modulus phase of 1/A is carried by phi_2.
          const cplx alpha = geo / amplitude_A(c, 0.0, sigma, phi, d);
          const double phase = bp.d0 - l0 - lc;
          part += rule.weights[ks] * cut * w * alpha * std::polar(1.0, omega * phase);
        }
        line += part * (0.5 * (b - a));
      }
      panel_sum += rule.weights[kt] * line;
    }
    partial[p] = panel_sum * (0.5 * (t1 - t0));
  });
  cplx total = 0.0;
  for (const cplx& v : partial) total += v;
  return total;
}

}  // namespace hfot
