#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

struct P2 {
  double x = 0.0, y = 0.0;
};
inline P2 operator+(P2 a, P2 b) { return {a.x + b.x, a.y + b.y}; }
inline P2 operator-(P2 a, P2 b) { return {a.x - b.x, a.y - b.y}; }
inline P2 operator*(double s, P2 a) { return {s * a.x, s * a.y}; }
inline double dot(P2 a, P2 b) { return a.x * b.x + a.y * b.y; }
inline double len(P2 a) { return std::hypot(a.x, a.y); }

template <class T>
T simpson_step(const std::function<T(double)>& f, double a, double b, T fa, T fm, T fb, T whole, double tol,
               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const T flm = f(lm), frm = f(rm);
  const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const T delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step<T>(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step<T>(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature.
template <class T>
T simpson(const std::function<T(double)>& f, double a, double b, double tol = 1e-12, int depth = 40) {
  const T fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step<T>(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Golub-Welsch-free Newton iteration.
inline void gauss_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) {
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        break;
      }
    }
    if (w[i] == 0.0) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (z * p1 - p0) / (z * z - 1.0);
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
}

/// Central first difference.
inline double diff1(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Second difference with one Richardson extrapolation.
inline double diff2(const std::function<double(double)>& f, double x, double h) {
  auto d = [&](double s) { return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

/// int e^{i omega t^2/2} e^{-t^2} dt over the real line.
inline cplx gaussian_fresnel(double omega) { return std::sqrt(pi / cplx(1.0, -0.5 * omega)); }

/// Entry and exit points of the line (s, theta) on the circle of radius r.
inline void chord(double s, double theta, double r, P2& x0, P2& xc) {
  const P2 th{std::cos(theta), std::sin(theta)};
  const P2 tp{-std::sin(theta), std::cos(theta)};
  const double q = std::sqrt(r * r - s * s);
  x0 = s * tp - q * th;
  xc = s * tp + q * th;
}

/// Double-scattering measurement by nested Gauss-Legendre quadrature, for a
/// scattering coefficient supported in the disk |x - centre| < radius,
/// constant extinction and isotropic phase function 1/(2 pi).
struct DoubleScatterSetup {
  double r = 1.0;
  double sigma = 0.2;
  P2 centre{0.05, 0.0};
  double radius = 0.3;
  std::function<double(P2)> k;
  int radial = 24;
  int angular = 48;
};

inline cplx double_scatter(const DoubleScatterSetup& su, double s, double theta, double omega) {
  P2 x0, xc;
  chord(s, theta, su.r, x0, xc);
  const P2 n0 = (1.0 / su.r) * x0, nc = (1.0 / su.r) * xc;
  const double phase_fn = 1.0 / (2.0 * pi);
  std::vector<double> gr, wr, ga, wa;
  gauss_nodes(su.radial, gr, wr);
  gauss_nodes(su.angular, ga, wa);
  auto prop = [&](P2 a, P2 b) {
    const double d = len(b - a);
    return std::polar(std::exp(-su.sigma * d), -omega * d);
  };
  cplx total = 0.0;
  // Outer point in polar coordinates about the support centre.
  for (int i = 0; i < su.radial; ++i) {
    const double rho1 = 0.5 * su.radius * (gr[i] + 1.0);
    for (int a = 0; a < su.angular; ++a) {
      const double ang1 = pi * (ga[a] + 1.0);
      const P2 x1 = su.centre + P2{rho1 * std::cos(ang1), rho1 * std::sin(ang1)};
      const double k1 = su.k(x1);
      if (k1 == 0.0) continue;
      const double w1 = 0.5 * su.radius * wr[i] * pi * wa[a] * rho1;
      const double l01 = len(x1 - x0);
      const P2 v01 = (1.0 / l01) * (x1 - x0);
      const cplx a1 = k1 * prop(x0, x1) / l01 * std::abs(dot(n0, v01)) * phase_fn;
      // Inner point in polar coordinates about x1; the Jacobian cancels 1/|x2 - x1|.
      cplx inner = 0.0;
      for (int b = 0; b < su.angular; ++b) {
        const double ang2 = pi * (ga[b] + 1.0);
        const P2 dir{std::cos(ang2), std::sin(ang2)};
        // Distance along dir to the far side of the support disk.
        const P2 rel = x1 - su.centre;
        const double pb = dot(rel, dir);
        const double reach = -pb + std::sqrt(std::max(0.0, pb * pb - dot(rel, rel) + su.radius * su.radius));
        if (reach <= 0.0) continue;
        for (int j = 0; j < su.radial; ++j) {
          const double rho2 = 0.5 * reach * (gr[j] + 1.0);
          const P2 x2 = x1 + rho2 * dir;
          const double k2 = su.k(x2);
          if (k2 == 0.0) continue;
          const double l2c = len(xc - x2);
          const P2 v2c = (1.0 / l2c) * (xc - x2);
          const cplx term = k2 * std::polar(std::exp(-su.sigma * rho2), -omega * rho2) * phase_fn * prop(x2, xc) /
                            l2c * std::abs(dot(nc, v2c));
          inner += 0.5 * reach * wr[j] * pi * wa[b] * term;
        }
      }
      total += w1 * a1 * inner;
    }
  }
  return total;
}

/// Single-scattering measurement by Gauss-Legendre quadrature over the support disk.
inline cplx single_scatter(const DoubleScatterSetup& su, double s, double theta, double omega, int radial,
                           int angular) {
  P2 x0, xc;
  chord(s, theta, su.r, x0, xc);
  const P2 n0 = (1.0 / su.r) * x0, nc = (1.0 / su.r) * xc;
  std::vector<double> gr, wr, ga, wa;
  gauss_nodes(radial, gr, wr);
  gauss_nodes(angular, ga, wa);
  cplx total = 0.0;
  for (int i = 0; i < radial; ++i) {
    const double rho = 0.5 * su.radius * (gr[i] + 1.0);
    for (int a = 0; a < angular; ++a) {
      const double ang = pi * (ga[a] + 1.0);
      const P2 x = su.centre + P2{rho * std::cos(ang), rho * std::sin(ang)};
      const double kx = su.k(x);
      if (kx == 0.0) continue;
      const double l0 = len(x - x0), lc = len(xc - x);
      const P2 v0 = (1.0 / l0) * (x - x0), vc = (1.0 / lc) * (xc - x);
      const double d = l0 + lc;
      const cplx val = kx / (2.0 * pi) * std::polar(std::exp(-su.sigma * d), -omega * d) / (l0 * lc) *
                       std::abs(dot(n0, v0)) * std::abs(dot(nc, vc));
      total += 0.5 * su.radius * wr[i] * pi * wa[a] * rho * val;
    }
  }
  return total;
}

/// Bessel-series free closed form of the ramp filter with the ideal profile:
/// (1/(4 pi^2)) int_0^b t cos(t u) dt.
inline double ideal_ramp(double u, double b) {
  if (std::abs(u) < 1e-8) return b * b / (8.0 * pi * pi);
  return (b * std::sin(b * u) / u + (std::cos(b * u) - 1.0) / (u * u)) / (4.0 * pi * pi);
}

}  // namespace oracle
