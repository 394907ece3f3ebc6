// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hfot/config.hpp"
#include "hfot/errors.hpp"
#include "hfot/experiments.hpp"
#include "hfot/io.hpp"
#include "hfot/oscphase.hpp"
#include "hfot/quadrature.hpp"
#include "hfot/xray.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace hfot;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  // Least squares in log-log coordinates, written out independently of the library.
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Vec2 random_in_disk(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rad = radius * std::sqrt(u(rng));
  const double ang = 2.0 * oracle::pi * u(rng);
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

double raised_cosine(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double c = std::cos(oracle::pi * (t - 0.5));
  return c * c;
}

// Physical experiments share one medium: a broad smooth bump, 32-point grids.
ExperimentConfig physics_config() {
  ExperimentConfig cfg = default_config();
  PhantomComponent c;
  c.kind = "bump";
  c.center = {0.03, 0.02};
  c.radius = 0.55;
  c.amplitude = 1.0;
  cfg.phantom.components = {c};
  cfg.phantom.krho_max = 0.3;
  cfg.n_s = 32;
  cfg.n_theta = 32;
  cfg.n_x = 32;
  cfg.mc.n_paths = 20000;
  cfg.mc.max_order = 4;
  cfg.omega_list = {64.0, 128.0, 256.0, 512.0};
  cfg.b_list = {8.0};
  cfg.contraction.trials = 3;
  return cfg;
}

// 1. P^{-1,b} P f against W_b * f for a Gaussian, W_b * f by a Hankel-transform oracle.
Outcome mollifier_identity() {
  const DiskDomain d(1.0, 0.2);
  const double w = 0.12;
  const Vec2 c{0.1, -0.05};
  const double b = 16.0;
  const SinogramGrid grid(512, 512, d);
  RealSino g(grid);
  for (int i = 0; i < grid.n_s; ++i)
    for (int j = 0; j < grid.n_theta; ++j) {
      const double t = grid.theta(j);
      const double off = grid.s(i) - (-c.x * std::sin(t) + c.y * std::cos(t));
      g.at(i, j) = std::sqrt(2.0 * oracle::pi) * w * std::exp(-off * off / (2.0 * w * w));
    }
  FilterSpec spec;
  spec.b = b;
  const Lattice lat(512, 1.0);
  const ScalarField rec = fbp(g, spec, lat, FbpMode::Interpolated);

  std::vector<double> x, wt;
  oracle::gauss_nodes(48, x, wt);
  auto smoothed = [&](double dist) {
    double sum = 0.0;
    for (int half = 0; half < 2; ++half) {
      const double a = 0.5 * b * half, h = 0.25 * b;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double rho = a + h * (x[k] + 1.0);
        sum += h * wt[k] * raised_cosine(rho / b) * std::exp(-0.5 * w * w * rho * rho) *
               std::cyl_bessel_j(0.0, rho * dist) * rho;
      }
    }
    return w * w * sum;
  };
  double err = 0.0, peak = 1.0;
  const double within = d.s_max();
  for (std::size_t k = 0; k < lat.size(); ++k) {
    const Vec2 p = lat.node(k);
    if (norm(p) > within) continue;
    err = std::max(err, std::abs(rec.values()[k] - smoothed(norm(p - c))));
  }
  return {err <= 1e-3 * peak, "sup error " + fmt(err) + " vs 1e-3 sup|f| = " + fmt(1e-3 * peak)};
}

// 2. w_b(u) = b^2 w_1(bu), with w_b also checked against direct quadrature of its definition.
Outcome filter_scaling() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  FilterSpec unit;
  unit.b = 1.0;
  double worst = 0.0, worst_def = 0.0;
  for (double b : {4.0, 8.0, 16.0}) {
    FilterSpec spec;
    spec.b = b;
    for (int k = 0; k < 100; ++k) {
      const double u = dist(rng);
      const double lhs = filter_w(u, spec), rhs = b * b * filter_w(b * u, unit);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
      if (k < 10) {
        const double def =
            oracle::simpson<double>([&](double t) { return t * raised_cosine(t / b) * std::cos(t * u); }, 0.0, b,
                                    1e-14) /
            (4.0 * oracle::pi * oracle::pi);
        worst_def = std::max(worst_def, std::abs(lhs - def) / std::max(1.0, std::abs(def)));
      }
    }
  }
  return {worst <= 1e-10 && worst_def <= 1e-9,
          "max relative scaling defect " + fmt(worst) + ", definition defect " + fmt(worst_def)};
}

// 3. <P f, g> = <f, P# g> for random smooth pairs.
Outcome adjointness() {
  const DiskDomain d(1.0, 0.2);
  const SinogramGrid grid(256, 256, d);
  const Lattice lat(256, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const Vec2 c{0.4 * u(rng), 0.4 * u(rng)};
    const double w2 = 0.01 + 0.01 * (u(rng) + 1.0);
    auto f = [&](Vec2 x) { return std::exp(-norm2(x - c) / (2.0 * w2)); };
    const RealSino pf = radon(f, grid, 0.95, 0.004);
    const double a = u(rng), s0 = 0.3 * u(rng);
    RealSino g(grid);
    for (int i = 0; i < grid.n_s; ++i)
      for (int j = 0; j < grid.n_theta; ++j) {
        const double s = grid.s(i) - s0;
        g.at(i, j) = std::exp(-s * s / (2.0 * 0.15 * 0.15)) * (1.0 + 0.5 * a * std::cos(grid.theta(j) + a));
      }
    double lhs = 0.0;
    for (std::size_t k = 0; k < g.values.size(); ++k) lhs += pf.values[k] * g.values[k];
    lhs *= grid.ds() * grid.dtheta();
    const ScalarField bp = backproject(g, lat);
    double rhs = 0.0;
    for (std::size_t k = 0; k < lat.size(); ++k) rhs += f(lat.node(k)) * bp.values()[k];
    rhs *= lat.h() * lat.h();
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
  }
  return {worst <= 1e-4, "max relative defect " + fmt(worst)};
}

// 4. Curvature bounds of both phases on random admissible samples.
Outcome appendix_bounds() {
  const DiskDomain d(1.0, 0.2);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * oracle::pi), off(-d.s_max(), d.s_max());
  const double lo1 = -2.0 / d.D, hi1 = -d.D / (4.0 * d.r * d.r);
  const double lo2 = -8.0 * d.r / (d.D * d.D), hi2 = -2.0 * d.D / (d.r * d.r);
  int v1 = 0, v2 = 0;
  for (int k = 0; k < 10000; ++k) {
    const Vec2 y = random_in_disk(rng, d.s_max());
    const Phase1Model m1(y, ang(rng), d);
    const double c1 = phi1_second_derivative(m1, 0.0, 0.0);
    // Off-chord sample: x in B_{r-D}, line offset uniform over the admissible range.
    const Vec2 x = random_in_disk(rng, d.s_max());
    const double t = ang(rng);
    const Vec2 nrm{-std::sin(t), std::cos(t)};
    const double v = dot(x, nrm) - off(rng);
    const Phase1Model m1v(x - v * nrm, t, d);
    const double c1v = phi1_second_derivative(m1v, 0.0, v);
    if (!(c1 >= lo1 && c1 <= hi1)) ++v1;
    if (!(c1v >= lo1 && c1v <= hi1)) ++v1;
    const Phase2Model m2(random_in_disk(rng, d.support_radius()), random_in_disk(rng, d.support_radius()), d);
    const double ss = phi2_derivatives(m2, {off(rng), ang(rng)}).ss;
    if (!(ss >= lo2 && ss <= hi2)) ++v2;
  }
  return {v1 == 0 && v2 == 0, "phi1 violations " + std::to_string(v1) + "/20000, phi2 violations " +
                                  std::to_string(v2) + "/10000"};
}

// 5. Critical-angle curvature of S_2 against differences of an independent maximisation.
Outcome critical_curvature() {
  const DiskDomain d(1.0, 0.2);
  std::mt19937_64 rng(5);
  auto phi2 = [](Vec2 a, Vec2 b, double s, double t) {
    oracle::P2 x0, xc;
    oracle::chord(s, t, 1.0, x0, xc);
    return oracle::len(xc - x0) - oracle::len(x0 - oracle::P2{a.x, a.y}) - oracle::len(xc - oracle::P2{b.x, b.y});
  };
  auto s2 = [&](Vec2 a, Vec2 b, double t) {
    // Golden-section maximisation over s; phi2 is strictly concave in s.
    double lo = -d.s_max(), hi = d.s_max();
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = phi2(a, b, x1, t), f2 = phi2(a, b, x2, t);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = phi2(a, b, x2, t);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = phi2(a, b, x1, t);
      }
    }
    return std::max(f1, f2);
  };
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vec2 a = random_in_disk(rng, d.support_radius()), b = random_in_disk(rng, d.support_radius());
    const Phase2Model m(a, b, d);
    const double t1m = std::atan2(b.y - a.y, b.x - a.x);
    for (bool fwd : {true, false}) {
      const double tc = fwd ? t1m : t1m + oracle::pi;
      const double num = oracle::diff2([&](double t) { return s2(a, b, t); }, tc, 2e-3);
      worst = std::max(worst, std::abs(num - s2_curvature_closed_form(m, fwd)) / std::abs(num));
    }
  }
  double det_max = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vec2 p = random_in_disk(rng, d.support_radius());
    const Phase2Model m(p, p, d);
    for (int j = 0; j < 32; ++j) det_max = std::max(det_max, std::abs(s2_profile(m, 2.0 * oracle::pi * j / 32).det));
  }
  // Shrinking separation drives the determinant to zero.
  const Vec2 p{0.1, -0.2}, e{std::cos(1.1), std::sin(1.1)};
  double prev = 1e300;
  bool shrinking = true;
  for (double sep : {0.4, 0.1, 0.025, 0.00625}) {
    const Phase2Model m(p, p + sep * e, d);
    double mx = 0.0;
    for (int j = 0; j < 32; ++j) mx = std::max(mx, std::abs(s2_profile(m, 2.0 * oracle::pi * (j + 0.25) / 32).det));
    shrinking = shrinking && mx < prev;
    prev = mx;
  }
  return {worst <= 1e-6 && det_max <= 1e-8 && shrinking,
          "max relative S2'' defect " + fmt(worst) + ", max |det| at coincidence " + fmt(det_max) +
              (shrinking ? ", det decreasing with separation" : ", det NOT decreasing with separation")};
}

// 6. Remainder rate of the first-order stationary phase term.
Outcome stationary_phase_rate() {
  std::vector<double> om{64.0, 256.0, 1024.0, 4096.0}, rem;
  double oracle_err = 0.0;
  for (double w : om) {
    const StationaryPhaseResult r = gaussian_quadratic_case(w);
    const cplx ref = oracle::gaussian_fresnel(w);
    oracle_err = std::max(oracle_err, std::abs(r.I - ref) / std::abs(ref));
    // Leading term from its textbook form, independent of the library's bookkeeping.
    const cplx lead = std::sqrt(2.0 * oracle::pi / w) * std::polar(1.0, oracle::pi / 4.0);
    rem.push_back(std::abs(ref - lead));
    oracle_err = std::max(oracle_err, std::abs(r.remainder - (ref - lead)) / std::abs(ref - lead) * 1e-2);
  }
  const double slope = slope_of(om, rem);
  return {slope >= -1.6 && slope <= -1.35 && oracle_err <= 1e-8,
          "fitted exponent " + fmt(slope) + ", max relative oracle defect " + fmt(oracle_err)};
}

// 7. Single scattering against its leading term.
Outcome single_remainder() {
  ExperimentConfig cfg = physics_config();
  const Medium m = make_medium(cfg);
  const SinogramGrid grid(16, 16, cfg.domain);
  const oracle::DoubleScatterSetup su = [&] {
    oracle::DoubleScatterSetup s;
    s.k = [&m](oracle::P2 x) { return m.k(Vec2{x.x, x.y}); };
    const PhantomComponent& bump = cfg.phantom.components.front();
    s.centre = {bump.center.x, bump.center.y};
    s.radius = bump.radius;
    return s;
  }();
  std::vector<double> om{32.0, 64.0, 128.0, 256.0}, diff;
  double check = 0.0;
  for (double w : om) {
    SynthesisOptions opts;
    opts.ballistic = false;
    opts.multiple = false;
    const Synthesis syn = synthesize_data(grid, w, m, cfg.mc, opts);
    double mx = 0.0;
    for (std::size_t k = 0; k < syn.single.values.size(); ++k)
      mx = std::max(mx, std::abs(syn.single.values[k] - syn.leading.values[k]));
    diff.push_back(mx);
    if (w == 32.0) {
      // Spot-check the synthesized single-scattering term against polar quadrature.
      for (std::size_t k : {std::size_t(37), std::size_t(130), std::size_t(201)}) {
        const ParallelCoord c = grid.coord(k);
        const cplx ref = oracle::single_scatter(su, c.s, c.theta, w, 96, 192);
        check = std::max(check, std::abs(syn.single.values[k] - ref) / std::abs(ref));
      }
    }
  }
  const double slope = slope_of(om, diff);
  return {slope <= -0.9 && check <= 1e-3,
          "fitted exponent " + fmt(slope) + ", single-scattering oracle defect " + fmt(check)};
}

// 8. Direct reconstruction error against frequency at b = 8, strong medium.
Outcome direct_scaling() {
  ExperimentConfig cfg = physics_config();
  cfg.phantom.krho_max = 1.0;
  cfg.mc.n_paths = 200000;
  cfg.contraction.enabled = false;
  cfg.sweep_iterate = false;
  const SweepResult sweep = run_sweep(cfg);
  std::vector<double> om, err;
  double floor = 1e300, sd = 0.0;
  for (const SweepRow& r : sweep.rows) {
    om.push_back(r.omega);
    err.push_back(r.direct_error);
    floor = std::min(floor, r.direct_error);
    sd = std::max(sd, r.mc_stderr);
  }
  const double slope = slope_of(om, err);
  std::string rows;
  for (std::size_t i = 0; i < om.size(); ++i) rows += " " + fmt(om[i]) + ":" + fmt(err[i]);
  return {slope <= -0.4 && sd < 0.1 * floor,
          "fitted exponent " + fmt(slope) + ", max MC stderr " + fmt(sd) + " vs error floor " + fmt(floor) +
              "; errors" + rows};
}

// 9. Iterated reconstruction at omega = 256, b = 8.
Outcome iterative_improvement() {
  const ExperimentConfig cfg = physics_config();
  const Medium m = make_medium(cfg);
  const double omega = 256.0, R = cfg.domain.support_radius();
  const Synthesis syn = synthesize_for(cfg, m, omega);
  InversionConfig ic = make_inversion(cfg, omega, 8.0);
  const ScalarField truth = lowpass_truth(syn.krho_projection, ic);
  const double direct = sup_diff(mask_disk(apply_inverse(syn.data, ic), R), truth, R);
  const ContractionReport rep = measure_contraction(cfg, ic, truth);
  const double c1 = rep.c1;
  if (!(c1 < 1.0)) return {false, "measured c1 = " + fmt(c1) + " is not a contraction"};
  ic.contraction = c1;
  const ReconstructionState st = iterate(syn.data, ic, truth);

  // k rho sampled directly, with rho = (r^2 - |x|^2)^{-1/2}.
  ScalarField krho(ic.out, 0.0);
  for (std::size_t k = 0; k < krho.values().size(); ++k) {
    const Vec2 x = ic.out.node(k);
    if (norm(x) <= R) krho.values()[k] = m.k(x) / std::sqrt(1.0 - norm2(x));
  }
  const double gap = sup_diff(krho, truth, R);
  const double K1 = rep.K0 * (1.0 - c1) / (mollifier_W_l1(ic.filter) + c1);
  const double size = sup_norm(krho, R);

  bool decreasing = true;
  const std::size_t last = std::min<std::size_t>(5, st.errors.size() - 1);
  for (std::size_t n = 0; n < last; ++n) decreasing = decreasing && st.errors[n + 1] < st.errors[n];
  const double final_err = st.errors.back();
  const double bound = c1 / (1.0 - c1) * gap;
  std::string errs;
  for (double e : st.errors) errs += " " + fmt(e);
  return {decreasing && final_err <= 0.5 * direct && final_err <= bound && size <= K1 && st.step_norms.size() >= 1,
          "errors" + errs + (decreasing ? " (strictly decreasing)" : " (NOT strictly decreasing)") + "; final/direct " +
              fmt(final_err / direct) + "; bound c1/(1-c1)|krho-[krho]_b| = " + fmt(bound) + " with c1 " + fmt(c1) +
              "; |krho| " + fmt(size) + " <= K1 " + fmt(K1)};
}

// 10. Contraction constant across frequency and bandwidth.
Outcome contraction_regime() {
  const ExperimentConfig cfg = physics_config();
  const Medium m = make_medium(cfg);
  auto c1_at = [&](double omega, double b) {
    const InversionConfig ic = make_inversion(cfg, omega, b);
    const ScalarField truth = lowpass_truth(krho_projection(m, ic.grid), ic);
    return measure_contraction(cfg, ic, truth).c1;
  };
  std::vector<double> om{64.0, 128.0, 256.0, 512.0}, c_om;
  for (double w : om) c_om.push_back(c1_at(w, 8.0));
  std::vector<double> bs{4.0, 8.0, 16.0}, c_b;
  for (double b : bs) c_b.push_back(b == 8.0 ? c_om[2] : c1_at(256.0, b));
  bool dec = true, inc = true;
  for (std::size_t i = 1; i < c_om.size(); ++i) dec = dec && c_om[i] < c_om[i - 1];
  for (std::size_t i = 1; i < c_b.size(); ++i) inc = inc && c_b[i] > c_b[i - 1];
  std::vector<double> fo, fb, fc;
  for (std::size_t i = 0; i < om.size(); ++i) {
    fo.push_back(om[i]);
    fb.push_back(8.0);
    fc.push_back(c_om[i]);
  }
  for (std::size_t i = 0; i < bs.size(); ++i)
    if (bs[i] != 8.0) {
      fo.push_back(256.0);
      fb.push_back(bs[i]);
      fc.push_back(c_b[i]);
    }
  const ContractionShape shape = fit_contraction_shape(fo, fb, fc);
  std::string s1, s2;
  for (double v : c_om) s1 += " " + fmt(v);
  for (double v : c_b) s2 += " " + fmt(v);
  return {dec && inc && shape.C1 + shape.C2 > 0.0,
          "c1 over omega" + s1 + (dec ? " (decreasing)" : " (NOT decreasing)") + "; over b" + s2 +
              (inc ? " (increasing)" : " (NOT increasing)") + "; shape fit C1 " + fmt(shape.C1) + " C2 " +
              fmt(shape.C2) + " rms log residual " + fmt(shape.rms_log_residual)};
}

// 11. Double-scattering Monte Carlo against nested quadrature.
Outcome double_scattering_mc() {
  const DiskDomain d(1.0, 0.2);
  PhantomSpec spec;
  PhantomComponent c;
  c.kind = "bump";
  c.center = {0.05, 0.0};
  c.radius = 0.3;
  c.amplitude = 0.5;
  spec.components = {c};
  const Phantom p(spec, d);
  const Medium m =
      make_medium(d, ScalarField::constant(Lattice(8, 1.0), 0.2), PhaseFunction::isotropic(), p, 0.02);
  oracle::DoubleScatterSetup su;
  su.k = [p](oracle::P2 x) { return p(Vec2{x.x, x.y}); };
  McBudget budget;
  budget.n_paths = 200000;
  budget.seed = 11;
  double worst = 0.0;
  int stream = 0;
  for (double s : {-0.3, 0.0, 0.3})
    for (double t : {0.4, 2.1, 4.0}) {
      const McEstimate est = multiple_scattering({s, t}, 16.0, 2, m, budget, static_cast<std::uint64_t>(stream++));
      const cplx ref = oracle::double_scatter(su, s, t, 16.0);
      worst = std::max(worst, std::abs(est.value - ref) / est.stderr_abs());
    }
  return {worst <= 3.0, "max deviation " + fmt(worst) + " standard errors over 9 probes"};
}

// 12. Every subcommand twice with the same seed; all outputs compared byte for byte.
Outcome determinism() {
  const char* cli = std::getenv("HFOT_CLI_PATH");
#ifdef HFOT_CLI_DEFAULT
  if (!cli) cli = HFOT_CLI_DEFAULT;
#endif
  if (!cli) return {false, "HFOT_CLI_PATH not set"};
  const fs::path root = fs::temp_directory_path() / "hfot_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  nlohmann::json j = {{"grid", {{"n_s", 16}, {"n_theta", 16}, {"n_x", 16}}},
                      {"omega_list", {16, 32, 64}},
                      {"b_list", {4}},
                      {"mc", {{"n_paths", 60}, {"max_order", 3}}},
                      {"contraction", {{"trials", 1}}},
                      {"iteration", {{"max_iters", 3}}},
                      {"verify", {{"sample_count", 500}, {"pair_count", 10}, {"stationary_phase_omegas", {64, 256, 1024}}}},
                      {"seed", 5}};
  write_text((root / "cfg.json").string(), j.dump(2));
  auto run = [&](const std::string& args, const fs::path& out) {
    const std::string cmd = std::string(cli) + " " + args + " --config " + (root / "cfg.json").string() +
                            " --out " + out.string() + " > " + (out.string() + ".log") + " 2>&1";
    return std::system(cmd.c_str());
  };
  std::vector<std::string> problems;
  int files = 0;
  std::vector<std::string> digests[2];
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path out = root / ("run" + std::to_string(rep));
    fs::create_directories(out);
    if (run("synth", out) != 0) problems.push_back("synth failed");
    const std::string sino = (out / "data_w32.hrts").string();
    if (run("invert " + sino, out) != 0) problems.push_back("invert failed");
    if (run("iterate " + sino, out) != 0) problems.push_back("iterate failed");
    if (run("sweep", out) != 0) problems.push_back("sweep failed");
    if (run("verify", out) != 0) problems.push_back("verify failed");
    std::vector<fs::path> paths;
    for (const auto& e : fs::recursive_directory_iterator(out))
      if (e.is_regular_file()) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& pth : paths)
      digests[rep].push_back(fs::relative(pth, out).string() + ":" + fnv1a_hex(read_text(pth.string())));
    files = static_cast<int>(paths.size());
  }
  const bool same = digests[0] == digests[1];
  std::string why;
  for (const auto& s : problems) why += " " + s + ";";
  return {problems.empty() && same && files > 0,
          std::to_string(files) + " output files, " + (same ? "identical" : "DIFFERENT") + why};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> only(argv + 1, argv + argc);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 fbp_mollifier_identity", mollifier_identity},
      {"C2 filter_bandwidth_scaling", filter_scaling},
      {"C3 backprojection_adjointness", adjointness},
      {"C4 phase_curvature_bounds", appendix_bounds},
      {"C5 critical_curvature_closed_form", critical_curvature},
      {"C6 stationary_phase_remainder_rate", stationary_phase_rate},
      {"C7 single_scattering_remainder_rate", single_remainder},
      {"C8 direct_reconstruction_scaling", direct_scaling},
      {"C9 iterative_improvement", iterative_improvement},
      {"C10 contraction_regime", contraction_regime},
      {"C11 double_scattering_monte_carlo", double_scattering_mc},
      {"C12 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name.substr(0, name.find(' '))) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " | " << o.detail << " | " << fmt(secs) << " s"
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
