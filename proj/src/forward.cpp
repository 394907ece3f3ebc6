#include "hfot/forward.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include "hfot/errors.hpp"
#include "hfot/parallel.hpp"
#include "hfot/quadrature.hpp"
#include "hfot/random.hpp"
#include "hfot/xray.hpp"

namespace hfot {

Medium make_medium(const DiskDomain& d, const ScalarField& sigma, const PhaseFunction& phi, const Phantom& k,
                   double k_step) {
  Medium m;
  m.domain = d;
  m.sigma = sigma;
  m.phi = phi;
  m.k = [k](Vec2 x) { return k(x); };
  m.k_support = k.support_radius();
  m.k_step = k_step;
  double peak = 0.0;
  for (const auto& c : k.spec().components) peak += std::abs(c.amplitude) * k.scale();
  m.k_sup = peak;
  return m;
}

Medium make_medium(const DiskDomain& d, const ScalarField& sigma, const PhaseFunction& phi, const ScalarField& k) {
  Medium m;
  m.domain = d;
  m.sigma = sigma;
  m.phi = phi;
  m.k = [k](Vec2 x) { return k(x); };
  m.k_support = std::min(k.support_radius(), d.support_radius());
  m.k_step = k.lattice().h();
  m.k_sup = k.max_abs();
  return m;
}

void McBudget::validate() const {
  if (n_paths < 1) throw ConfigError("Monte-Carlo budget needs n_paths >= 1");
  if (max_order < 2) throw ConfigError("Monte-Carlo budget needs max_order >= 2");
}

namespace {

void check_line(ParallelCoord c, const DiskDomain& d) {
  if (std::abs(c.s) > d.s_max() * (1.0 + 1e-12)) throw DomainError("line offset outside the restricted set |s| <= r - D");
}

}  // namespace

cplx ballistic(ParallelCoord c, double omega, const Medium& m) {
  check_line(c, m.domain);
  const BoundaryPair b = boundary_points(c, m.domain);
  const double r = m.domain.r;
  const double cosine2 = (r * r - c.s * c.s) / (r * r);
  const double depth = Attenuator(m.sigma).optical_depth(b.x0, b.xc);
  return std::polar(std::exp(-depth) * cosine2 / b.d0, -omega * b.d0);
}

SingleScatterQuadrature::SingleScatterQuadrature(const Medium& m, double omega, const QuadPolicy& policy)
    : medium_(&m), omega_(omega) {
  if (policy.points_per_wavelength < 4.0)
    throw PreconditionError("single-scattering quadrature needs at least 4 points per wavelength");
  if (omega < 0.0) throw DomainError("frequency must be nonnegative");
  step_ = 0.5 * m.k_step;
  if (omega > 0.0) step_ = std::min(step_, 2.0 * kPi / (omega * policy.points_per_wavelength));
  const double R = m.k_support;
  if (!m.k || !(R > 0.0)) return;
  const int cells = static_cast<int>(std::ceil(2.0 * R / step_));
  const double h = 2.0 * R / cells;
  step_ = h;
  for (int iy = 0; iy < cells; ++iy)
    for (int ix = 0; ix < cells; ++ix) {
      const Vec2 x{-R + (ix + 0.5) * h, -R + (iy + 0.5) * h};
      if (norm2(x) >= R * R) continue;
      const double kv = m.k(x);
      if (kv == 0.0) continue;
      points_.push_back(x);
      weights_.push_back(kv * h * h);
    }
}

cplx SingleScatterQuadrature::evaluate(ParallelCoord c) const {
  const Medium& m = *medium_;
  check_line(c, m.domain);
  const BoundaryPair b = boundary_points(c, m.domain);
  const double r2 = m.domain.r * m.domain.r;
  const Attenuator att(m.sigma);
  const bool iso = m.phi.kind() == PhaseFunction::Kind::Isotropic;
  const double phi_iso = m.phi(b.e0, b.e0);
  cplx sum = 0.0;
  for (std::size_t p = 0; p < points_.size(); ++p) {
    const Vec2 x = points_[p];
    const Vec2 a = x - b.x0;
    const Vec2 c2 = x - b.xc;
    const double d1 = norm(a), d2 = norm(c2);
    const double path = d1 + d2;
    const double ph = iso ? phi_iso : m.phi(a / d1, -c2 / d2);
    const double geo = std::abs(dot(a, b.x0)) * std::abs(dot(c2, b.xc)) / (r2 * d1 * d1 * d2 * d2);
    const double depth = att.is_constant() ? att.constant_value() * path
                                           : att.optical_depth(b.x0, x) + att.optical_depth(x, b.xc);
    sum += std::polar(weights_[p] * ph * geo * std::exp(-depth), -omega_ * (path - b.d0));
  }
  return sum * std::polar(1.0, -omega_ * b.d0);
}

cplx single_scattering(ParallelCoord c, double omega, const Medium& m, const QuadPolicy& policy) {
  return SingleScatterQuadrature(m, omega, policy).evaluate(c);
}

cplx leading_single_from_projection(ParallelCoord c, double omega, const Medium& m, double krho_projection) {
  if (!(omega > 0.0)) throw DomainError("leading single-scattering term needs omega > 0");
  check_line(c, m.domain);
  const BoundaryPair b = boundary_points(c, m.domain);
  const double r = m.domain.r;
  const double cosine2 = (r * r - c.s * c.s) / (r * r);
  const double depth = Attenuator(m.sigma).optical_depth(b.x0, b.xc);
  const double mod = std::sqrt(2.0 * kPi / (b.d0 * omega)) * std::exp(-depth) * cosine2 * m.phi(b.e0, b.e0);
  return std::polar(mod * krho_projection, -omega * b.d0 - 0.25 * kPi);
}

namespace {

double krho_line(ParallelCoord c, const Medium& m) {
  const double R = m.k_support;
  if (!m.k || !(R > 0.0) || std::abs(c.s) >= R) return 0.0;
  const double r = m.domain.r;
  // Same chord rule as the sinogram-wide transform.
  const Vec2 th = direction(c.theta);
  const Vec2 base = c.s * normal_direction(c.theta);
  const double half = std::sqrt(R * R - c.s * c.s);
  const double step = 0.5 * m.k_step;
  const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * half / step)));
  const double width = 2.0 * half / panels;
  const GaussRule& rule = gauss_legendre(2);
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = -half + (p + 0.5) * width;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const Vec2 x = base + (mid + 0.5 * width * rule.nodes[k]) * th;
      sum += rule.weights[k] * m.k(x) * rho_weight(x, r);
    }
  }
  return 0.5 * width * sum;
}

}  // namespace

cplx leading_single(ParallelCoord c, double omega, const Medium& m) {
  return leading_single_from_projection(c, omega, m, krho_line(c, m));
}

RealSino krho_projection(const Medium& m, const SinogramGrid& grid, int threads) {
  const double R = m.k_support;
  if (!m.k || !(R > 0.0)) return RealSino(grid);
  const double r = m.domain.r;
  const FieldFn& k = m.k;
  return radon([&k, r](Vec2 x) { return k(x) * rho_weight(x, r); }, grid, R, 0.5 * m.k_step, threads);
}

McEstimate multiple_scattering(ParallelCoord c, double omega, int order, const Medium& m, const McBudget& budget,
                               std::uint64_t stream) {
  if (order < 2) throw DomainError("multiple scattering needs order >= 2");
  budget.validate();
  check_line(c, m.domain);
  McEstimate est;
  const double R = m.k_support;
  if (!m.k || !(R > 0.0)) return est;

  const BoundaryPair b = boundary_points(c, m.domain);
  const double r = m.domain.r;
  const Attenuator att(m.sigma);
  const double weight = kPi * R * R * std::pow(4.0 * kPi * R, order - 1);
  Rng rng(derive_seed(budget.seed, stream, static_cast<std::uint64_t>(order)));

  constexpr int kMaxOrder = 32;
  if (order > kMaxOrder) throw DomainError("collision order too large");
  std::array<Vec2, kMaxOrder + 2> pts;
  std::array<double, 2 * kMaxOrder> u;
  double s_re = 0.0, s_im = 0.0, s_rr = 0.0, s_ii = 0.0, s_ri = 0.0;
  const int n = budget.n_paths;
  for (int path = 0; path < n; ++path) {
    // Every path consumes the same number of draws so streams stay aligned
    // across different coefficients.
    for (int q = 0; q < 2 * order; ++q) u[q] = rng.uniform();
    pts[0] = b.x0;
    const double rad = R * std::sqrt(u[0]);
    pts[1] = rad * direction(2.0 * kPi * u[1]);
    double kprod = m.k(pts[1]);
    for (int j = 2; j <= order && kprod != 0.0; ++j) {
      pts[j] = pts[j - 1] + (2.0 * R * u[2 * j - 2]) * direction(2.0 * kPi * u[2 * j - 1]);
      if (norm2(pts[j]) >= R * R) {
        kprod = 0.0;
        break;
      }
      kprod *= m.k(pts[j]);
    }
    if (kprod == 0.0) continue;
    pts[order + 1] = b.xc;

    double total = 0.0, depth = 0.0, phase_fn = 1.0;
    std::array<Vec2, kMaxOrder + 1> dirs;
    std::array<double, kMaxOrder + 1> lens;
    for (int j = 0; j <= order; ++j) {
      const Vec2 seg = pts[j + 1] - pts[j];
      lens[j] = norm(seg);
      dirs[j] = seg / lens[j];
      total += lens[j];
      if (!att.is_constant()) depth += att.optical_depth(pts[j], pts[j + 1]);
    }
    if (att.is_constant()) depth = att.constant_value() * total;
    for (int j = 1; j <= order; ++j) phase_fn *= m.phi(dirs[j - 1], dirs[j]);
    const double geo = std::abs(dot(b.x0, dirs[0])) * std::abs(dot(b.xc, dirs[order])) / (r * r * lens[0] * lens[order]);
    const cplx v = std::polar(weight * kprod * phase_fn * geo * std::exp(-depth), -omega * (total - b.d0));
    s_re += v.real();
    s_im += v.imag();
    s_rr += v.real() * v.real();
    s_ii += v.imag() * v.imag();
    s_ri += v.real() * v.imag();
  }
  const double nn = static_cast<double>(n);
  const double m_re = s_re / nn, m_im = s_im / nn;
  est.value = cplx(m_re, m_im) * std::polar(1.0, -omega * b.d0);
  if (n > 1) {
    // Covariance of the unrotated mean, then rotated by the common phase.
    const double vr = std::max(0.0, (s_rr - nn * m_re * m_re) / (nn * (nn - 1.0)));
    const double vi = std::max(0.0, (s_ii - nn * m_im * m_im) / (nn * (nn - 1.0)));
    const double cv = (s_ri - nn * m_re * m_im) / (nn * (nn - 1.0));
    const double ca = std::cos(omega * b.d0), sa = -std::sin(omega * b.d0);
    est.var_re = ca * ca * vr + sa * sa * vi - 2.0 * ca * sa * cv;
    est.var_im = sa * sa * vr + ca * ca * vi + 2.0 * ca * sa * cv;
    est.cov = ca * sa * (vr - vi) + (ca * ca - sa * sa) * cv;
  }
  return est;
}

double series_factor(const Medium& m) { return m.k_sup * m.phi.sup_norm() * 2.0 * kPi * m.domain.diameter(); }

Synthesis synthesize_data(const SinogramGrid& grid, double omega, const Medium& m, const McBudget& budget,
                          const SynthesisOptions& opts) {
  if (opts.multiple) budget.validate();
  if (opts.leading && !(omega > 0.0)) throw DomainError("synthesis of the leading term needs omega > 0");
  Synthesis out;
  out.data.data = ComplexSino(grid);
  out.data.omega = omega;
  out.data.domain = m.domain;
  out.ballistic = ComplexSino(grid);
  out.single = ComplexSino(grid);
  out.leading = ComplexSino(grid);
  out.multiple = ComplexSino(grid);
  out.multiple_var_re = RealSino(grid);
  out.multiple_var_im = RealSino(grid);
  out.multiple_cov = RealSino(grid);

  if (opts.leading) out.krho_projection = krho_projection(m, grid, opts.threads);

  std::vector<double> top_order(grid.size(), 0.0);
  std::unique_ptr<SingleScatterQuadrature> quad;
  if (opts.single) quad = std::make_unique<SingleScatterQuadrature>(m, omega, opts.quad);

  parallel_for(grid.size(), opts.threads, [&](std::size_t idx) {
    const ParallelCoord c = grid.coord(idx);
    if (opts.ballistic) out.ballistic.values[idx] = ballistic(c, omega, m);
    if (opts.single) out.single.values[idx] = quad->evaluate(c);
    if (opts.leading) out.leading.values[idx] = leading_single_from_projection(c, omega, m, out.krho_projection.values[idx]);
    if (opts.multiple) {
      cplx sum = 0.0;
      double vr = 0.0, vi = 0.0, cv = 0.0;
      for (int order = 2; order <= budget.max_order; ++order) {
        const McEstimate e = multiple_scattering(c, omega, order, m, budget, idx);
        sum += e.value;
        vr += e.var_re;
        vi += e.var_im;
        cv += e.cov;
        if (order == budget.max_order) top_order[idx] = std::abs(e.value) + 3.0 * e.stderr_abs();
      }
      out.multiple.values[idx] = sum;
      out.multiple_var_re.values[idx] = vr;
      out.multiple_var_im.values[idx] = vi;
      out.multiple_cov.values[idx] = cv;
    }
    cplx total = 0.0;
    if (opts.single) total += out.single.values[idx];
    if (opts.multiple) total += out.multiple.values[idx];
    if (opts.noise_level > 0.0) {
      Rng rng(derive_seed(budget.seed, idx, 0x6e6f697365ULL));
      const double a = rng.normal();
      const double bq = rng.normal();
      total += opts.noise_level * cplx(a, bq);
    }
    out.data.data.values[idx] = total;
  });

  // Geometric tail estimate for the truncated collision series.
  const double kappa = series_factor(m);
  // The highest computed order bounds the next one up to kappa.
  const double last_order = *std::max_element(top_order.begin(), top_order.end());
  nlohmann::json meta;
  meta["omega"] = omega;
  meta["components"] = {{"ballistic", opts.ballistic},
                        {"single", opts.single},
                        {"leading", opts.leading},
                        {"multiple", opts.multiple}};
  meta["budget"] = {{"n_paths", budget.n_paths}, {"max_order", budget.max_order}, {"seed", budget.seed}};
  meta["quadrature_step"] = quad ? quad->step() : 0.0;
  meta["points_per_wavelength"] = opts.quad.points_per_wavelength;
  meta["series_factor"] = kappa;
  meta["noise_level"] = opts.noise_level;
  if (opts.multiple) {
    if (kappa < 1.0)
      meta["tail_bound"] = last_order * kappa / (1.0 - kappa);
    else
      meta["tail_bound"] = nullptr;
    if (kappa >= 1.0) meta["warnings"] = {"series factor >= 1: collision series convergence not guaranteed"};
  }
  out.data.meta = meta;
  return out;
}

}  // namespace hfot
