#include "hfot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hfot/errors.hpp"
#include "hfot/io.hpp"
#include "hfot/quadrature.hpp"
#include "hfot/random.hpp"

namespace hfot {

using nlohmann::json;

Synthesis synthesize_for(const ExperimentConfig& cfg, const Medium& m, double omega) {
  SynthesisOptions opts;
  opts.ballistic = false;
  opts.quad = cfg.quad;
  opts.noise_level = cfg.noise_level;
  opts.threads = cfg.threads;
  return synthesize_data(make_grid(cfg), omega, m, cfg.mc, opts);
}

ScalarField lowpass_truth(const RealSino& krho_projection, const InversionConfig& ic) {
  return mask_disk(fbp(krho_projection, ic.filter, ic.out, FbpMode::Interpolated, ic.threads),
                   ic.domain.support_radius());
}

StationaryPhaseResult gaussian_quadratic_case(double omega) {
  Phase1D ph;
  ph.value = [](double x) { return 0.5 * x * x; };
  ph.d1 = [](double x) { return x; };
  ph.d2 = [](double) { return 1.0; };
  ph.lo = -8.0;
  ph.hi = 8.0;
  ph.curv_min = 1.0;
  ph.curv_max = 1.0;
  return stationary_phase_1d(ph, [](double x) { return std::exp(-x * x); }, omega);
}

ContractionShape fit_contraction_shape(const std::vector<double>& omega, const std::vector<double>& b,
                                       const std::vector<double>& c1) {
  ContractionShape out;
  const std::size_t n = omega.size();
  if (n == 0 || b.size() != n || c1.size() != n) return out;
  std::vector<double> fa(n), fb(n), wt(n);
  for (std::size_t i = 0; i < n; ++i) {
    fa[i] = (b[i] * b[i] + std::pow(b[i], 5)) / omega[i];
    fb[i] = std::pow(b[i], 3) / std::sqrt(omega[i]) * std::log(std::max(omega[i] / b[i], 1.0 + 1e-12));
    wt[i] = c1[i] > 0.0 ? 1.0 / c1[i] : 0.0;
  }
  auto cost = [&](double A, double B) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = wt[i] * (c1[i] - A * fa[i] - B * fb[i]);
      s += r * r;
    }
    return s;
  };
  double saa = 0, sbb = 0, sab = 0, say = 0, sby = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w2 = wt[i] * wt[i];
    saa += w2 * fa[i] * fa[i];
    sbb += w2 * fb[i] * fb[i];
    sab += w2 * fa[i] * fb[i];
    say += w2 * fa[i] * c1[i];
    sby += w2 * fb[i] * c1[i];
  }
  double bestA = 0.0, bestB = 0.0, best = cost(0.0, 0.0);
  const double det = saa * sbb - sab * sab;
  if (det > 0.0) {
    const double A = (say * sbb - sby * sab) / det;
    const double B = (sby * saa - say * sab) / det;
    if (A >= 0.0 && B >= 0.0 && cost(A, B) < best) {
      best = cost(A, B);
      bestA = A;
      bestB = B;
    }
  }
  if (saa > 0.0) {
    const double A = std::max(0.0, say / saa);
    if (cost(A, 0.0) < best) {
      best = cost(A, 0.0);
      bestA = A;
      bestB = 0.0;
    }
  }
  if (sbb > 0.0) {
    const double B = std::max(0.0, sby / sbb);
    if (cost(0.0, B) < best) {
      best = cost(0.0, B);
      bestA = 0.0;
      bestB = B;
    }
  }
  out.C1 = bestA;
  out.C2 = bestB;
  double s = 0.0;
  int cnt = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double model = bestA * fa[i] + bestB * fb[i];
    if (c1[i] > 0.0 && model > 0.0) {
      const double r = std::log(c1[i] / model);
      s += r * r;
      ++cnt;
    }
  }
  out.rms_log_residual = cnt > 0 ? std::sqrt(s / cnt) : 0.0;
  return out;
}

ContractionReport measure_contraction(const ExperimentConfig& cfg, const InversionConfig& ic, const ScalarField& base) {
  return contraction_report(ic, base, cfg.contraction.trials, cfg.contraction.perturbation, cfg.mc.seed);
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  if (cfg.omega_list.size() < 3) throw ConfigError("sweep needs at least 3 frequencies");
  SweepResult res;
  const Medium m = make_medium(cfg);
  const double R = cfg.domain.support_radius();
  for (double omega : cfg.omega_list) {
    const Synthesis syn = synthesize_for(cfg, m, omega);
    for (double b : cfg.b_list) {
      InversionConfig ic = make_inversion(cfg, omega, b);
      const ScalarField truth = lowpass_truth(syn.krho_projection, ic);
      const ScalarField direct = mask_disk(apply_inverse(syn.data, ic), R);
      SweepRow row;
      row.omega = omega;
      row.b = b;
      row.direct_error = sup_diff(direct, truth, R);
      const ScalarField var =
          inverse_variance(syn.multiple_var_re, syn.multiple_var_im, syn.multiple_cov, omega, ic);
      double sd = 0.0;
      for (double v : mask_disk(var, R).values()) sd = std::max(sd, std::sqrt(std::max(v, 0.0)));
      row.mc_stderr = sd;
      if (cfg.contraction.enabled && cfg.contraction.trials > 0) {
        try {
          row.c1 = measure_contraction(cfg, ic, truth).c1;
          if (ic.contraction <= 0.0 && row.c1 < 1.0) ic.contraction = row.c1;
        } catch (const PreconditionError&) {
          row.status = "outside_ball";
        }
      }
      if (cfg.sweep_iterate) {
        try {
          const ReconstructionState st = iterate(syn.data, ic, truth);
          row.iterated_error = st.errors.back();
          row.iterations = static_cast<int>(st.step_norms.size());
        } catch (const DivergenceError&) {
          row.status = "diverged";
        }
      }
      res.rows.push_back(row);
    }
  }
  for (double b : cfg.b_list) {
    std::vector<double> om, err;
    for (const auto& r : res.rows)
      if (r.b == b && r.direct_error > 0.0) {
        om.push_back(r.omega);
        err.push_back(r.direct_error);
      }
    SweepFit f;
    f.b = b;
    if (om.size() >= 2) {
      f.slope = loglog_slope(om, err);
      f.verdict = f.slope <= -0.4 ? "consistent" : "inconsistent";
    } else {
      f.slope = std::numeric_limits<double>::quiet_NaN();
      f.verdict = "insufficient";
    }
    res.fits.push_back(f);
  }
  std::vector<double> om, bb, cc;
  for (const auto& r : res.rows)
    if (r.c1 > 0.0) {
      om.push_back(r.omega);
      bb.push_back(r.b);
      cc.push_back(r.c1);
    }
  res.shape = fit_contraction_shape(om, bb, cc);
  return res;
}

std::string sweep_csv(const SweepResult& res) {
  std::string out = "omega,b,direct_error,iterated_error,c1,mc_stderr,iterations,status\n";
  for (const auto& r : res.rows) {
    out += format_double(r.omega) + ',' + format_double(r.b) + ',' + format_double(r.direct_error) + ',' +
           format_double(r.iterated_error) + ',' + format_double(r.c1) + ',' + format_double(r.mc_stderr) + ',' +
           std::to_string(r.iterations) + ',' + r.status + '\n';
  }
  return out;
}

std::string fits_csv(const SweepResult& res) {
  std::string out = "b,slope,predicted,verdict\n";
  for (const auto& f : res.fits)
    out += format_double(f.b) + ',' + format_double(f.slope) + ",-0.5," + f.verdict + '\n';
  out += "# c1 shape: C1=" + format_double(res.shape.C1) + " C2=" + format_double(res.shape.C2) +
         " rms_log_residual=" + format_double(res.shape.rms_log_residual) + '\n';
  return out;
}

std::string iteration_csv(const ReconstructionState& st) {
  std::string out = "n,step_norm,error\n";
  for (std::size_t n = 0; n < st.iterates.size(); ++n) {
    out += std::to_string(n) + ',';
    out += n == 0 ? std::string("") : format_double(st.step_norms[n - 1]);
    out += ',';
    out += n < st.errors.size() ? format_double(st.errors[n]) : std::string("");
    out += '\n';
  }
  return out;
}

namespace {

Vec2 uniform_in_disk(Rng& rng, double radius) {
  const double rad = radius * std::sqrt(rng.uniform());
  return rad * direction(2.0 * kPi * rng.uniform());
}

/// Second difference of S_2 with one Richardson step.
double s2_second_difference(const Phase2Model& model, double theta, double h) {
  auto S = [&](double t) { return model.value({critical_curve_sigma(model, t), t}); };
  auto d2 = [&](double step) { return (S(theta + step) - 2.0 * S(theta) + S(theta - step)) / (step * step); };
  return (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
}

}  // namespace

VerifyReport run_verify(const ExperimentConfig& cfg) {
  VerifyReport out;
  json checks = json::array();
  const DiskDomain& d = cfg.domain;
  const int n = cfg.verify.sample_count;
  auto record = [&](const std::string& name, bool pass, json detail) {
    detail["name"] = name;
    detail["passed"] = pass;
    checks.push_back(detail);
    if (!pass) out.failures.push_back(name);
  };

  if (n > 0) {
    Rng rng(derive_seed(cfg.mc.seed, 0x76657269ULL));
    // Curvature of phi_1 in v over admissible (y, theta, u, v).
    {
      const double lim = d.s_max();
      int violations = 0;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int k = 0; k < n; ++k) {
        const Vec2 y = uniform_in_disk(rng, lim);
        const double theta = 2.0 * kPi * rng.uniform();
        const Phase1Model model(y, theta, d);
        double u, v;
        do {
          u = lim * (2.0 * rng.uniform() - 1.0);
          v = lim * (2.0 * rng.uniform() - 1.0);
        } while (norm(model.point(u, v)) > lim);
        const double c = model.second_derivative(u, v);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        if (c < model.lower_bound() || c > model.upper_bound()) ++violations;
      }
      record("phi1_vv_bounds", violations == 0,
             {{"samples", n}, {"violations", violations}, {"observed_min", lo}, {"observed_max", hi},
              {"bound_lo", -2.0 / d.D}, {"bound_hi", -d.D / (4.0 * d.r * d.r)}});
    }
    // Curvature of phi_2 in s over the restricted line set.
    {
      int violations = 0;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      const double R = d.support_radius();
      for (int k = 0; k < n; ++k) {
        const Phase2Model model(uniform_in_disk(rng, R), uniform_in_disk(rng, R), d);
        const ParallelCoord c{d.s_max() * (2.0 * rng.uniform() - 1.0), 2.0 * kPi * rng.uniform()};
        const double v = model.derivatives(c).ss;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        if (v < model.ss_lower_bound() || v > model.ss_upper_bound()) ++violations;
      }
      record("phi2_ss_bounds", violations == 0,
             {{"samples", n}, {"violations", violations}, {"observed_min", lo}, {"observed_max", hi},
              {"bound_lo", -8.0 * d.r / (d.D * d.D)}, {"bound_hi", -2.0 * d.D / (d.r * d.r)}});
    }
    // Critical-curve bracket.
    {
      int violations = 0;
      const double R = d.support_radius();
      for (int k = 0; k < n; ++k) {
        const Phase2Model model(uniform_in_disk(rng, R), uniform_in_disk(rng, R), d);
        const double theta = 2.0 * kPi * rng.uniform();
        const double s = critical_curve_sigma(model, theta);
        const Vec2 tp = normal_direction(theta);
        const double a = dot(model.x1(), tp), b = dot(model.xm(), tp);
        if (s < std::min(a, b) || s > std::max(a, b)) ++violations;
      }
      record("sigma_bracket", violations == 0, {{"samples", n}, {"violations", violations}});
    }
    // Curvature of S_2 at the critical angles.
    {
      const int pairs = cfg.verify.pair_count;
      double worst = 0.0, worst_value = 0.0;
      const double R = d.support_radius();
      for (int k = 0; k < pairs; ++k) {
        Vec2 x1, xm;
        do {
          x1 = uniform_in_disk(rng, R);
          xm = uniform_in_disk(rng, R);
        } while (norm(x1 - xm) < 0.05);
        const Phase2Model model(x1, xm, d);
        for (bool fwd : {true, false}) {
          const double theta = fwd ? model.theta_1m() : wrap_angle(model.theta_1m() + kPi);
          const double closed = s2_curvature_closed_form(model, fwd);
          const double numeric = s2_second_difference(model, theta, 1e-3);
          worst = std::max(worst, std::abs(closed - numeric) / std::abs(closed));
          const double val = model.value({critical_curve_sigma(model, theta), theta});
          worst_value = std::max(worst_value, std::abs(val - (fwd ? 1.0 : -1.0) * model.separation()));
        }
      }
      record("s2_curvature_closed_form", worst <= 1e-6, {{"pairs", pairs}, {"max_rel_diff", worst}});
      record("s2_critical_values", worst_value <= 1e-10, {{"pairs", pairs}, {"max_abs_diff", worst_value}});
    }
    // Caustic: coincident scatterers make the Hessian singular on the curve.
    {
      double worst = 0.0;
      const double R = d.support_radius();
      for (int k = 0; k < 100; ++k) {
        const Vec2 x = uniform_in_disk(rng, R);
        const Phase2Model model(x, x, d);
        const double theta = 2.0 * kPi * rng.uniform();
        worst = std::max(worst, std::abs(model.det_on_curve({critical_curve_sigma(model, theta), theta})));
      }
      record("caustic_determinant", worst <= 1e-8, {{"max_abs_det", worst}});
    }
    // Angular margins of S at separation 0.5.
    {
      const Phase2Model model({-0.25, 0.05}, {0.25, 0.05}, d);
      const MarginReport rep = lemma_S_margins(model, cfg.verify.delta0, 2048);
      const Phase2Model half({-0.125, 0.05}, {0.125, 0.05}, d);
      const MarginReport rep_half = lemma_S_margins(half, cfg.verify.delta0, 2048);
      record("lemma_S_margins", rep.C1 > 0.0 && rep.C2 > 0.0,
             {{"separation", rep.separation},
              {"delta0", rep.delta0},
              {"C1", rep.C1},
              {"C2", rep.C2},
              {"C2_candidate", rep.C2_candidate},
              {"C2_candidate_holds", rep.C2_candidate_holds},
              {"half_separation_C1", rep_half.C1},
              {"half_separation_C2", rep_half.C2}});
    }
    // First-order stationary phase remainder rate.
    {
      std::vector<double> om, rem;
      double worst_oracle = 0.0;
      for (double w : cfg.verify.stationary_phase_omegas) {
        const StationaryPhaseResult r = gaussian_quadratic_case(w);
        const cplx exact = std::sqrt(kPi / cplx(1.0, -0.5 * w));
        worst_oracle = std::max(worst_oracle, std::abs(r.I - exact) / std::abs(exact));
        om.push_back(w);
        rem.push_back(std::abs(r.remainder));
      }
      const double slope = om.size() >= 2 ? loglog_slope(om, rem) : 0.0;
      record("stationary_phase_rate", slope >= -1.6 && slope <= -1.35 && worst_oracle <= 1e-8,
             {{"omegas", om}, {"remainders", rem}, {"slope", slope}, {"oracle_rel_diff", worst_oracle}});
    }
  }
  out.report = {{"checks", checks}, {"failures", out.failures}, {"config_hash", config_hash(cfg)}};
  return out;
}

}  // namespace hfot
