#include "hfot/xray.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "hfot/errors.hpp"
#include "hfot/parallel.hpp"
#include "hfot/quadrature.hpp"

namespace hfot {

double FilterSpec::profile_value(double t) const {
  t = std::abs(t);
  if (t > 1.0) return 0.0;
  if (profile == FilterProfile::Ideal) return 1.0;
  if (t <= 0.5) return 1.0;
  const double c = std::cos(kPi * (t - 0.5));
  return c * c;
}

std::string FilterSpec::profile_name() const {
  return profile == FilterProfile::Ideal ? "ideal" : "raised_cosine";
}

FilterProfile FilterSpec::parse_profile(const std::string& name) {
  if (name == "raised_cosine") return FilterProfile::RaisedCosine;
  if (name == "ideal") return FilterProfile::Ideal;
  throw ConfigError("unknown filter profile '" + name + "'");
}

namespace {

/// int_{a1}^{a2} t cos(c t) dt
double moment_cos(double c, double a1, double a2) {
  const double ac = std::abs(c);
  if (ac * a2 < 0.5) {
    double sum = 0.0, coef = 1.0;
    double p1 = a1 * a1, p2 = a2 * a2;
    const double a12 = a1 * a1, a22 = a2 * a2, c2 = c * c;
    for (int n = 0; n < 30; ++n) {
      const double term = coef * (p2 - p1) / (2.0 * n + 2.0);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      coef *= -c2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
      p1 *= a12;
      p2 *= a22;
    }
    return sum;
  }
  auto prim = [c](double t) { return t * std::sin(c * t) / c + std::cos(c * t) / (c * c); };
  return prim(a2) - prim(a1);
}

void check_bandwidth(const FilterSpec& spec) {
  if (!(spec.b > 0.0)) throw DomainError("filter bandwidth must be positive");
}

}  // namespace

double filter_w(double u, const FilterSpec& spec) {
  check_bandwidth(spec);
  const double b = spec.b;
  const double scale = 1.0 / (4.0 * kPi * kPi);
  if (spec.profile == FilterProfile::Ideal) return scale * moment_cos(u, 0.0, b);
  const double k = 2.0 * kPi / b;
  const double lo = moment_cos(u, 0.0, 0.5 * b);
  const double hi = 0.5 * moment_cos(u, 0.5 * b, b) - 0.25 * moment_cos(k - u, 0.5 * b, b) -
                    0.25 * moment_cos(k + u, 0.5 * b, b);
  return scale * (lo + hi);
}

double filter_w1_l1(const FilterSpec& spec) {
  if (spec.profile == FilterProfile::Ideal) throw DomainError("w_1 of the ideal profile is not integrable");
  FilterSpec unit = spec;
  unit.b = 1.0;
  const double cutoff = 2000.0;
  const double body = integrate_gl([&](double u) { return std::abs(filter_w(u, unit)); }, 0.0, cutoff, 4000, 8);
  // w_1(u) ~ -1/(4 pi^2 u^2) beyond the cutoff.
  const double tail = 1.0 / (4.0 * kPi * kPi * cutoff);
  return 2.0 * (body + tail);
}

double mollifier_W_radial(double radius, const FilterSpec& spec) {
  check_bandwidth(spec);
  const double b = spec.b;
  const double rad = std::abs(radius);
  auto integrand = [&](double t) { return spec.profile_value(t / b) * t * std::cyl_bessel_j(0.0, t * rad); };
  const int order = std::max(4, spec.quad_order);
  const int panels = 1 + static_cast<int>(std::ceil(b * rad / (2.0 * kPi)));
  double total;
  if (spec.profile == FilterProfile::Ideal) {
    total = integrate_gl(integrand, 0.0, b, 2 * panels, order);
  } else {
    total = integrate_gl(integrand, 0.0, 0.5 * b, panels, order) + integrate_gl(integrand, 0.5 * b, b, panels, order);
  }
  return total / (2.0 * kPi);
}

double mollifier_W(Vec2 x, const FilterSpec& spec) { return mollifier_W_radial(norm(x), spec); }

double mollifier_W_l1(const FilterSpec& spec) {
  check_bandwidth(spec);
  const double outer = 100.0 / spec.b;
  const int panels = 500;
  return 2.0 * kPi *
         integrate_gl([&](double rad) { return std::abs(mollifier_W_radial(rad, spec)) * rad; }, 0.0, outer, panels, 8);
}

RealSino radon(const FieldFn& f, const SinogramGrid& grid, double support, double step, int threads) {
  if (!(step > 0.0)) throw DomainError("radon: step must be positive");
  RealSino out(grid);
  const GaussRule& rule = gauss_legendre(2);
  parallel_for(grid.size(), threads, [&](std::size_t idx) {
    const ParallelCoord c = grid.coord(idx);
    if (std::abs(c.s) >= support) return;
    const double half = std::sqrt(support * support - c.s * c.s);
    const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * half / step)));
    const double width = 2.0 * half / panels;
    const Vec2 th = direction(c.theta);
    const Vec2 base = c.s * normal_direction(c.theta);
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = -half + (p + 0.5) * width;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        sum += rule.weights[k] * f(base + (mid + 0.5 * width * rule.nodes[k]) * th);
    }
    out.values[idx] = 0.5 * width * sum;
  });
  return out;
}

RealSino radon(const ScalarField& f, const SinogramGrid& grid, int threads) {
  const double support = std::min(f.support_radius(), f.lattice().r);
  return radon([&f](Vec2 x) { return f(x); }, grid, support, 0.5 * f.lattice().h(), threads);
}

namespace {

/// Linear interpolation of a projection on the midpoint grid, constant in the
/// half cells next to |s| = s_max and zero beyond.
double sample_projection(const double* row, int stride, const SinogramGrid& grid, double p) {
  if (std::abs(p) > grid.s_max) return 0.0;
  const double u = (p + grid.s_max) / grid.ds() - 0.5;
  if (u <= 0.0) return row[0];
  if (u >= grid.n_s - 1) return row[static_cast<std::size_t>(grid.n_s - 1) * stride];
  const int i = static_cast<int>(u);
  const double t = u - i;
  return (1.0 - t) * row[static_cast<std::size_t>(i) * stride] + t * row[static_cast<std::size_t>(i + 1) * stride];
}

}  // namespace

double backproject_at(const RealSino& g, Vec2 x) {
  const SinogramGrid& grid = g.grid;
  double sum = 0.0;
  for (int j = 0; j < grid.n_theta; ++j) {
    const double p = dot(x, normal_direction(grid.theta(j)));
    sum += sample_projection(g.values.data() + j, grid.n_theta, grid, p);
  }
  return sum * grid.dtheta();
}

ScalarField backproject(const RealSino& g, const Lattice& out, int threads) {
  ScalarField f(out, 0.0);
  auto& vals = f.values();
  parallel_for(static_cast<std::size_t>(out.nodes()), threads, [&](std::size_t iy) {
    for (int ix = 0; ix < out.nodes(); ++ix)
      vals[out.index(ix, static_cast<int>(iy))] = backproject_at(g, out.node(ix, static_cast<int>(iy)));
  });
  return f;
}

namespace {

ScalarField fbp_exact(const RealSino& g, const FilterSpec& spec, const Lattice& out, int threads) {
  const SinogramGrid& grid = g.grid;
  ScalarField f(out, 0.0);
  auto& vals = f.values();
  const double weight = grid.ds() * grid.dtheta();
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const Vec2 x = out.node(idx);
    double sum = 0.0;
    for (int j = 0; j < grid.n_theta; ++j) {
      const double p = dot(x, normal_direction(grid.theta(j)));
      for (int i = 0; i < grid.n_s; ++i) {
        const double v = g.at(i, j);
        if (v != 0.0) sum += filter_w(p - grid.s(i), spec) * v;
      }
    }
    vals[idx] = sum * weight;
  });
  return f;
}

ScalarField fbp_interpolated(const RealSino& g, const FilterSpec& spec, const Lattice& out, int threads) {
  const SinogramGrid& grid = g.grid;
  const double ds = grid.ds();
  const int over = std::clamp(static_cast<int>(std::ceil(ds * spec.b / 0.01)), 1, 64);
  const double delta = ds / over;
  const double reach = std::sqrt(2.0) * out.r + ds;
  const double s0 = grid.s(0);
  const int kmin = static_cast<int>(std::floor((-reach - s0) / delta));
  const int kmax = static_cast<int>(std::ceil((reach - s0) / delta));
  const int nk = kmax - kmin + 1;

  // w_b at every fine-grid offset (k - over * i) delta.
  const int lmin = kmin - over * (grid.n_s - 1);
  const int lmax = kmax;
  std::vector<double> table(static_cast<std::size_t>(lmax - lmin + 1));
  parallel_for(table.size(), threads,
               [&](std::size_t l) { table[l] = filter_w((static_cast<int>(l) + lmin) * delta, spec); });

  std::vector<double> filtered(static_cast<std::size_t>(grid.n_theta) * nk, 0.0);
  parallel_for(static_cast<std::size_t>(grid.n_theta), threads, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    double* row = filtered.data() + jj * nk;
    for (int i = 0; i < grid.n_s; ++i) {
      const double v = g.at(i, j) * ds;
      if (v == 0.0) continue;
      const double* w = table.data() + (kmin - over * i - lmin);
      for (int k = 0; k < nk; ++k) row[k] += w[k] * v;
    }
  });

  ScalarField f(out, 0.0);
  auto& vals = f.values();
  const double dtheta = grid.dtheta();
  std::vector<Vec2> normals(static_cast<std::size_t>(grid.n_theta));
  for (int j = 0; j < grid.n_theta; ++j) normals[j] = normal_direction(grid.theta(j));
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const Vec2 x = out.node(idx);
    double sum = 0.0;
    for (int j = 0; j < grid.n_theta; ++j) {
      const double u = (dot(x, normals[j]) - s0) / delta - kmin;
      const int k = std::clamp(static_cast<int>(std::floor(u)), 0, nk - 2);
      const double t = u - k;
      const double* row = filtered.data() + static_cast<std::size_t>(j) * nk;
      sum += (1.0 - t) * row[k] + t * row[k + 1];
    }
    vals[idx] = sum * dtheta;
  });
  return f;
}

}  // namespace

ScalarField fbp(const RealSino& g, const FilterSpec& spec, const Lattice& out, FbpMode mode, int threads) {
  check_bandwidth(spec);
  return mode == FbpMode::Exact ? fbp_exact(g, spec, out, threads) : fbp_interpolated(g, spec, out, threads);
}

ScalarField fbp_fourier(const RealSino& g, const FilterSpec& spec, const Lattice& out, int threads) {
  check_bandwidth(spec);
  const SinogramGrid& grid = g.grid;
  const double b = spec.b;
  // Frequency nodes on [0, b], split where the profile changes formula.
  const double span = std::sqrt(2.0) * out.r + grid.s_max;
  const int panels = 2 + static_cast<int>(std::ceil(b * span / (2.0 * kPi)));
  const GaussRule& rule = gauss_legendre(16);
  std::vector<double> freq, wt;
  auto add_piece = [&](double a, double c) {
    const double width = (c - a) / panels;
    for (int p = 0; p < panels; ++p)
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double f = a + (p + 0.5 + 0.5 * rule.nodes[k]) * width;
        freq.push_back(f);
        wt.push_back(0.5 * width * rule.weights[k] * f * spec.profile_value(f / b) / (4.0 * kPi * kPi));
      }
  };
  if (spec.profile == FilterProfile::Ideal) {
    add_piece(0.0, b);
  } else {
    add_piece(0.0, 0.5 * b);
    add_piece(0.5 * b, b);
  }
  const std::size_t nf = freq.size();

  // Spectrum of every projection at the frequency nodes.
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(grid.n_theta) * nf);
  parallel_for(static_cast<std::size_t>(grid.n_theta), threads, [&](std::size_t jj) {
    for (std::size_t k = 0; k < nf; ++k) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < grid.n_s; ++i) acc += g.at(i, static_cast<int>(jj)) * std::polar(1.0, -freq[k] * grid.s(i));
      spectrum[jj * nf + k] = acc * grid.ds();
    }
  });

  ScalarField f(out, 0.0);
  auto& vals = f.values();
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const Vec2 x = out.node(idx);
    double sum = 0.0;
    for (int j = 0; j < grid.n_theta; ++j) {
      const double p = dot(x, normal_direction(grid.theta(j)));
      const std::complex<double>* spec_row = spectrum.data() + static_cast<std::size_t>(j) * nf;
      for (std::size_t k = 0; k < nf; ++k) sum += wt[k] * (spec_row[k] * std::polar(1.0, freq[k] * p)).real();
    }
    vals[idx] = sum * grid.dtheta();
  });
  return f;
}

ScalarField fbp_variance(const RealSino& var, const FilterSpec& spec, const Lattice& out, int threads) {
  check_bandwidth(spec);
  const SinogramGrid& grid = var.grid;
  ScalarField f(out, 0.0);
  auto& vals = f.values();
  const double weight = grid.ds() * grid.dtheta();
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const Vec2 x = out.node(idx);
    double sum = 0.0;
    for (int j = 0; j < grid.n_theta; ++j) {
      const double p = dot(x, normal_direction(grid.theta(j)));
      for (int i = 0; i < grid.n_s; ++i) {
        const double v = var.at(i, j);
        if (v == 0.0) continue;
        const double w = filter_w(p - grid.s(i), spec) * weight;
        sum += w * w * v;
      }
    }
    vals[idx] = sum;
  });
  return f;
}

ScalarField lowpass_reference(const ScalarField& f, const FilterSpec& spec) {
  check_bandwidth(spec);
  const Lattice& lat = f.lattice();
  const int N = lat.nodes();
  const int M = 2 * N;
  const double h = lat.h();

  // Radial table of W_b, linearly interpolated.
  const double rmax = std::sqrt(2.0) * (N - 1) * h + h;
  const double dr = std::min(0.25 * h, 0.02 / spec.b);
  const int nr = static_cast<int>(std::ceil(rmax / dr)) + 2;
  std::vector<double> table(static_cast<std::size_t>(nr));
  parallel_for(table.size(), 0, [&](std::size_t k) { table[k] = mollifier_W_radial(k * dr, spec); });
  auto kernel = [&](double rad) {
    const double u = rad / dr;
    const int k = std::min(static_cast<int>(u), nr - 2);
    const double t = u - k;
    return (1.0 - t) * table[k] + t * table[k + 1];
  };

  const int Mh = M / 2 + 1;
  double* kin = fftw_alloc_real(static_cast<std::size_t>(M) * M);
  double* fin = fftw_alloc_real(static_cast<std::size_t>(M) * M);
  fftw_complex* kout = fftw_alloc_complex(static_cast<std::size_t>(M) * Mh);
  fftw_complex* fout = fftw_alloc_complex(static_cast<std::size_t>(M) * Mh);
  std::fill(kin, kin + static_cast<std::size_t>(M) * M, 0.0);
  std::fill(fin, fin + static_cast<std::size_t>(M) * M, 0.0);
  for (int a = -(N - 1); a <= N - 1; ++a)
    for (int c = -(N - 1); c <= N - 1; ++c) {
      const int ia = (a + M) % M, ic = (c + M) % M;
      kin[static_cast<std::size_t>(ic) * M + ia] = kernel(h * std::hypot(a, c)) * h * h;
    }
  for (int iy = 0; iy < N; ++iy)
    for (int ix = 0; ix < N; ++ix) fin[static_cast<std::size_t>(iy) * M + ix] = f.at(ix, iy);

  fftw_plan pk = fftw_plan_dft_r2c_2d(M, M, kin, kout, FFTW_ESTIMATE);
  fftw_plan pf = fftw_plan_dft_r2c_2d(M, M, fin, fout, FFTW_ESTIMATE);
  fftw_execute(pk);
  fftw_execute(pf);
  for (std::size_t k = 0; k < static_cast<std::size_t>(M) * Mh; ++k) {
    const double re = kout[k][0] * fout[k][0] - kout[k][1] * fout[k][1];
    const double im = kout[k][0] * fout[k][1] + kout[k][1] * fout[k][0];
    fout[k][0] = re;
    fout[k][1] = im;
  }
  fftw_plan pb = fftw_plan_dft_c2r_2d(M, M, fout, fin, FFTW_ESTIMATE);
  fftw_execute(pb);

  ScalarField out(lat, 0.0);
  auto& vals = out.values();
  const double norm_fft = 1.0 / (static_cast<double>(M) * M);
  for (int iy = 0; iy < N; ++iy)
    for (int ix = 0; ix < N; ++ix) vals[lat.index(ix, iy)] = fin[static_cast<std::size_t>(iy) * M + ix] * norm_fft;
  out.set_support_radius(lat.r);

  fftw_destroy_plan(pk);
  fftw_destroy_plan(pf);
  fftw_destroy_plan(pb);
  fftw_free(kin);
  fftw_free(fin);
  fftw_free(kout);
  fftw_free(fout);
  return out;
}

}  // namespace hfot
