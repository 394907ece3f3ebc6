#include "hfot/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hfot/errors.hpp"
#include "hfot/parallel.hpp"
#include "hfot/quadrature.hpp"
#include "hfot/random.hpp"

namespace hfot {

cplx amplitude_A(ParallelCoord c, double omega, const ScalarField& sigma, const PhaseFunction& phi,
                 const DiskDomain& d) {
  if (std::abs(c.s) > d.s_max() * (1.0 + 1e-12)) throw DomainError("amplitude_A: |s| must be <= r - D");
  const double r = d.r;
  const double q = std::sqrt(r * r - c.s * c.s);
  const double depth = radon_sigma(c, sigma, d);
  const Vec2 th = direction(c.theta);
  const double mod = std::sqrt(2.0 * kPi) * std::exp(-depth) * std::pow(q, 1.5) / (std::sqrt(2.0) * r * r) * phi(th, th);
  return std::polar(mod, -2.0 * omega * q - 0.25 * kPi);
}

double amplitude_inverse_bound(const ScalarField& sigma, const PhaseFunction& phi, const DiskDomain& d) {
  const double r = d.r;
  const double sig = sigma.max_abs();
  return r * r / std::sqrt(kPi) * std::exp(2.0 * r * sig) / std::pow(r * d.D, 0.75) / phi.forward_value();
}

double estimate_L_norm(const ScalarField& sigma, const DiskDomain& d, int n_samples) {
  if (n_samples < 1) throw DomainError("estimate_L_norm: n_samples must be >= 1");
  const double r = d.r;
  const Attenuator att(sigma);
  const int n_angles = 256;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  auto value_at = [&](Vec2 x) {
    double total = 0.0;
    for (int a = 0; a < n_angles; ++a) {
      const Vec2 dir = direction(2.0 * kPi * a / n_angles);
      const double xd = dot(x, dir);
      const double reach = -xd + std::sqrt(std::max(0.0, xd * xd + r * r - norm2(x)));
      double inner;
      if (att.is_constant()) {
        const double c = att.constant_value();
        inner = c * reach < 1e-8 ? reach * (1.0 - 0.5 * c * reach) : -std::expm1(-c * reach) / c;
      } else {
        inner = integrate_gl([&](double t) { return std::exp(-att.optical_depth(x, x + t * dir)); }, 0.0, reach,
                             std::max(2, static_cast<int>(std::ceil(reach / sigma.lattice().h()))), 4);
      }
      total += inner;
    }
    return total * 2.0 * kPi / n_angles;
  };
  // Centre first, then a sunflower spiral filling the disk.
  double best = value_at({0.0, 0.0});
  for (int k = 1; k < n_samples; ++k) {
    const double rad = r * std::sqrt((k + 0.5) / n_samples) * (1.0 - 1e-9);
    best = std::max(best, value_at(rad * direction(k * golden)));
  }
  return std::min(best, 2.0 * kPi * d.diameter());
}

double InversionConfig::resolved_K0() const {
  if (K0 > 0.0) return K0;
  return 0.8 / (phi.sup_norm() * estimate_L_norm(sigma, domain, 64));
}

namespace {

void check_grid(const SinogramGrid& a, const SinogramGrid& b) {
  if (a.n_s != b.n_s || a.n_theta != b.n_theta || std::abs(a.s_max - b.s_max) > 1e-12)
    throw ConfigError("sinogram grid does not match the inversion configuration");
}

/// sqrt(omega) chi / A^omega on every grid line.
std::vector<cplx> inverse_weights(double omega, const InversionConfig& cfg) {
  const SinogramGrid& grid = cfg.grid;
  std::vector<cplx> w(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t idx) {
    const ParallelCoord c = grid.coord(idx);
    const double cut = chi(c.s, cfg.domain);
    w[idx] = cut == 0.0 ? cplx(0.0) : std::sqrt(omega) * cut / amplitude_A(c, omega, cfg.sigma, cfg.phi, cfg.domain);
  });
  return w;
}

}  // namespace

Reconstruction apply_inverse_parts(const ComplexSino& g, double omega, const InversionConfig& cfg) {
  if (!(omega > 0.0)) throw DomainError("inversion needs omega > 0");
  check_grid(g.grid, cfg.grid);
  const std::vector<cplx> w = inverse_weights(omega, cfg);
  RealSino re(cfg.grid), im(cfg.grid);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const cplx v = w[k] * g.values[k];
    re.values[k] = v.real();
    im.values[k] = v.imag();
  }
  return {fbp(re, cfg.filter, cfg.out, FbpMode::Interpolated, cfg.threads),
          fbp(im, cfg.filter, cfg.out, FbpMode::Interpolated, cfg.threads)};
}

ScalarField apply_inverse(const Sinogram& data, const InversionConfig& cfg) {
  if (std::abs(data.omega - cfg.omega) > 1e-12 * std::max(1.0, cfg.omega))
    throw ConfigError("sinogram frequency does not match the inversion frequency");
  if (std::abs(data.domain.r - cfg.domain.r) > 1e-12 || std::abs(data.domain.D - cfg.domain.D) > 1e-12)
    throw ConfigError("sinogram domain does not match the inversion domain");
  return apply_inverse_parts(data.data, cfg.omega, cfg).real;
}

ScalarField inverse_variance(const RealSino& var_re, const RealSino& var_im, const RealSino& cov, double omega,
                             const InversionConfig& cfg) {
  check_grid(var_re.grid, cfg.grid);
  const std::vector<cplx> w = inverse_weights(omega, cfg);
  RealSino v(cfg.grid);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double a = w[k].real(), b = w[k].imag();
    v.values[k] = std::max(0.0, a * a * var_re.values[k] + b * b * var_im.values[k] - 2.0 * a * b * cov.values[k]);
  }
  return fbp_variance(v, cfg.filter, cfg.out, cfg.threads);
}

ScalarField mask_disk(const ScalarField& f, double radius) {
  ScalarField out = f;
  auto& vals = out.values();
  const double r2 = radius * radius;
  for (std::size_t k = 0; k < vals.size(); ++k)
    if (norm2(f.lattice().node(k)) >= r2) vals[k] = 0.0;
  out.set_support_radius(std::min(radius, f.lattice().r));
  return out;
}

Medium medium_from_krho(const ScalarField& q, const InversionConfig& cfg) {
  Medium m;
  m.domain = cfg.domain;
  m.sigma = cfg.sigma;
  m.phi = cfg.phi;
  const double R = cfg.domain.support_radius();
  const double r = cfg.domain.r;
  m.k = [q, R, r](Vec2 x) {
    const double x2 = norm2(x);
    if (x2 >= R * R) return 0.0;
    return q(x) * std::sqrt(r * r - x2);
  };
  m.k_support = R;
  m.k_step = q.lattice().h();
  m.k_sup = sup_norm(q, R) * r;
  return m;
}

ScalarField lowpass_discrete(const ScalarField& q, const InversionConfig& cfg) {
  const Medium m = medium_from_krho(q, cfg);
  return fbp(krho_projection(m, cfg.grid, cfg.threads), cfg.filter, cfg.out, FbpMode::Interpolated, cfg.threads);
}

ResidualData residual_data(const ScalarField& q, const InversionConfig& cfg, std::uint64_t seed) {
  const Medium m = medium_from_krho(q, cfg);
  McBudget budget = cfg.forward_budget;
  budget.seed = seed;
  SynthesisOptions opts;
  opts.ballistic = false;
  opts.quad = cfg.quad;
  opts.threads = cfg.threads;
  Synthesis s = synthesize_data(cfg.grid, cfg.omega, m, budget, opts);
  return {std::move(s.single), std::move(s.multiple), std::move(s.krho_projection)};
}

ResidualData operator-(const ResidualData& a, const ResidualData& b) {
  ResidualData d = a;
  for (std::size_t k = 0; k < d.single.values.size(); ++k) {
    d.single.values[k] -= b.single.values[k];
    d.multiple.values[k] -= b.multiple.values[k];
    d.projection.values[k] -= b.projection.values[k];
  }
  return d;
}

Residual residual_from_data(const ResidualData& data, const InversionConfig& cfg) {
  const double R = cfg.domain.support_radius();
  ScalarField single = apply_inverse_parts(data.single, cfg.omega, cfg).real;
  const ScalarField lowpass = fbp(data.projection, cfg.filter, cfg.out, FbpMode::Interpolated, cfg.threads);
  auto& sv = single.values();
  for (std::size_t k = 0; k < sv.size(); ++k) sv[k] -= lowpass.values()[k];
  ScalarField multiple = apply_inverse_parts(data.multiple, cfg.omega, cfg).real;
  ScalarField total = single;
  auto& tv = total.values();
  for (std::size_t k = 0; k < tv.size(); ++k) tv[k] += multiple.values()[k];
  return {mask_disk(total, R), mask_disk(single, R), mask_disk(multiple, R)};
}

Residual residual_R(const ScalarField& q, const InversionConfig& cfg, std::uint64_t seed) {
  const double K0 = cfg.resolved_K0();
  const double size = sup_norm(q, cfg.domain.support_radius());
  if (size > K0) {
    std::ostringstream msg;
    msg << "residual_R: sup|q| = " << size << " exceeds the contraction ball K0 = " << K0;
    throw PreconditionError(msg.str());
  }
  return residual_from_data(residual_data(q, cfg, seed), cfg);
}

ReconstructionState iterate(const Sinogram& data, const InversionConfig& cfg, const std::optional<ScalarField>& truth) {
  if (std::abs(data.omega - cfg.omega) > 1e-12 * std::max(1.0, cfg.omega))
    throw ConfigError("sinogram frequency does not match the inversion frequency");
  const double R = cfg.domain.support_radius();
  ReconstructionState st;
  st.K0 = cfg.resolved_K0();
  const Reconstruction parts = apply_inverse_parts(data.data, cfg.omega, cfg);
  const ScalarField q0 = mask_disk(parts.real, R);
  st.imag_norms.push_back(sup_norm(parts.imag, R));
  st.iterates.push_back(q0);
  if (truth) st.errors.push_back(sup_diff(q0, *truth, R));
  const double size0 = sup_norm(q0, R);
  if (size0 > st.K0) {
    std::ostringstream msg;
    msg << "direct reconstruction sup " << size0 << " already exceeds K0 = " << st.K0;
    throw DivergenceError(msg.str());
  }
  const double tol = cfg.stop_tol > 0.0 ? cfg.stop_tol : 1e-4 * size0;
  for (int n = 0; n < cfg.max_iters; ++n) {
    const std::uint64_t seed = cfg.common_random_numbers
                                   ? cfg.forward_budget.seed
                                   : derive_seed(cfg.forward_budget.seed, static_cast<std::uint64_t>(n + 1), 0x17ULL);
    const Residual res = residual_from_data(residual_data(st.iterates.back(), cfg, seed), cfg);
    ScalarField next = q0;
    auto& nv = next.values();
    for (std::size_t k = 0; k < nv.size(); ++k) nv[k] -= res.total.values()[k];
    next = mask_disk(next, R);
    const double step = sup_diff(next, st.iterates.back(), R);
    st.step_norms.push_back(step);
    st.iterates.push_back(next);
    if (truth) st.errors.push_back(sup_diff(next, *truth, R));
    const double size = sup_norm(next, R);
    if (size > st.K0) {
      std::ostringstream msg;
      msg << "iterate " << n + 1 << " left the contraction ball: sup " << size << " > K0 = " << st.K0
          << " (last step " << step << ")";
      throw DivergenceError(msg.str());
    }
    // With a known contraction constant c, ||q_{n+1} - q*|| <= c/(1-c) ||q_{n+1} - q_n||.
    const double bound = cfg.contraction > 0.0 && cfg.contraction < 1.0 ? cfg.contraction / (1.0 - cfg.contraction) * step
                                                                         : step;
    if (bound < tol) {
      st.converged = true;
      break;
    }
  }
  return st;
}

namespace {

ScalarField random_perturbation(const Lattice& lat, double R, double amplitude, Rng& rng) {
  const double width = 0.2;
  PhantomSpec spec;
  for (int c = 0; c < 3; ++c) {
    PhantomComponent comp;
    comp.kind = "bump";
    comp.radius = width;
    const double rad = (R - width) * std::sqrt(rng.uniform());
    comp.center = rad * direction(2.0 * kPi * rng.uniform());
    comp.amplitude = rng.uniform() < 0.5 ? -1.0 : 1.0;
    spec.components.push_back(comp);
  }
  ScalarField f(lat, 0.0);
  auto& vals = f.values();
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const Vec2 x = lat.node(k);
    double v = 0.0;
    for (const auto& c : spec.components) {
      const double t = norm2(x - c.center) / (c.radius * c.radius);
      if (t < 1.0) v += c.amplitude * std::exp(1.0 - 1.0 / (1.0 - t));
    }
    vals[k] = v;
  }
  const double peak = f.max_abs();
  if (peak > 0.0)
    for (auto& v : vals) v *= amplitude / peak;
  return f;
}

}  // namespace

ContractionReport contraction_report(const InversionConfig& cfg, const ScalarField& base, int trial_count,
                                     double perturbation, std::uint64_t seed) {
  ContractionReport rep;
  rep.K0 = cfg.resolved_K0();
  const double R = cfg.domain.support_radius();
  // Anchors: the given point and its radial image near the edge of the ball.
  std::vector<ScalarField> anchors{base};
  const double base_norm = sup_norm(base, R);
  const double edge = 0.85 * rep.K0;
  if (base_norm > 0.0 && base_norm < edge) {
    ScalarField far = base;
    for (double& v : far.values()) v *= edge / base_norm;
    anchors.push_back(far);
  }
  Rng rng(derive_seed(seed, 0xc0ffeeULL));
  for (const ScalarField& anchor : anchors) {
    const ResidualData ref = residual_data(anchor, cfg, cfg.forward_budget.seed);
    const double anchor_norm = sup_norm(anchor, R);
    for (int t = 0; t <= trial_count; ++t) {
      ScalarField delta(cfg.out);
      if (t == 0) {
        // Radial direction.
        if (anchor_norm == 0.0) continue;
        delta = anchor;
        for (double& v : delta.values()) v *= perturbation / anchor_norm;
      } else {
        delta = random_perturbation(cfg.out, R, perturbation, rng);
      }
      const double dn = sup_norm(delta, R);
      if (dn == 0.0) continue;
      ScalarField q = anchor;
      auto& qv = q.values();
      for (std::size_t k = 0; k < qv.size(); ++k) qv[k] += delta.values()[k];
      const Residual diff = residual_from_data(residual_data(q, cfg, cfg.forward_budget.seed) - ref, cfg);
      const double ratio = sup_norm(diff.total, R) / dn;
      rep.ratios.push_back(ratio);
      rep.c1 = std::max(rep.c1, ratio);
    }
  }
  return rep;
}

}  // namespace hfot
