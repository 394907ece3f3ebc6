#include "hfot/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hfot {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

FresnelCS fresnel_cs(double x) {
  const double ax = std::abs(x);
  FresnelCS out{0.0, 0.0};
  if (ax < std::sqrt(std::numeric_limits<double>::min())) {
    out.c = ax;
  } else if (ax < 1.5) {
    // Power series: term n is (pi x^2 / 2)^n / n! * x / (2n + 1), alternating
    // between the cosine (even n) and sine (odd n) parts.
    const double t = 0.5 * kPi * ax * ax;
    double fact = 1.0;
    for (int n = 0; n < 200; ++n) {
      if (n > 0) fact *= t / n;
      const double term = fact * ax / (2 * n + 1);
      const double sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
      if (n % 2 == 0)
        out.c += sign * term;
      else
        out.s += sign * term;
      if (n > 2 && term < 1e-17 * (out.c + std::abs(out.s))) break;
    }
  } else {
    // Continued fraction for erfc, evaluated by the modified Lentz method.
    const double pix2 = kPi * ax * ax;
    std::complex<double> b(1.0, -pix2);
    std::complex<double> cc = 1.0 / std::numeric_limits<double>::min();
    std::complex<double> d = 1.0 / b;
    std::complex<double> h = d;
    int n = -1;
    for (int k = 2; k < 400; ++k) {
      n += 2;
      const double a = -n * (n + 1.0);
      b += 4.0;
      d = 1.0 / (a * d + b);
      cc = b + a / cc;
      const std::complex<double> del = cc * d;
      h *= del;
      if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
    }
    h *= std::complex<double>(ax, -ax);
    const std::complex<double> cs =
        std::complex<double>(0.5, 0.5) * (1.0 - std::complex<double>(std::cos(0.5 * pix2), std::sin(0.5 * pix2)) * h);
    out.c = cs.real();
    out.s = cs.imag();
  }
  if (x < 0.0) {
    out.c = -out.c;
    out.s = -out.s;
  }
  return out;
}

std::complex<double> fresnel_F(double u, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("fresnel_F: sign must be +1 or -1");
  const double sqrt_pi = std::sqrt(kPi);
  const FresnelCS cs = fresnel_cs(u / sqrt_pi);
  const std::complex<double> half_total = 0.5 * std::sqrt(2.0 * kPi) * std::polar(1.0, 0.25 * kPi);
  const std::complex<double> value = half_total + sqrt_pi * std::complex<double>(cs.c, cs.s);
  return sign == 1 ? value : std::conj(value);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 matched points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace hfot
