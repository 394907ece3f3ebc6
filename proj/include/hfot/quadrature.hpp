#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace hfot {

inline constexpr double kPi = 3.14159265358979323846;

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (cached, thread-safe).
const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre integral of fn over [a, b] with `panels` equal panels
/// and an `order`-point rule per panel.
template <class Fn>
auto integrate_gl(Fn&& fn, double a, double b, int panels, int order = 8) {
  const GaussRule& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  using R = decltype(fn(a));
  R sum{};
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    R part{};
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      part += rule.weights[k] * fn(mid + 0.5 * width * rule.nodes[k]);
    sum += part * (0.5 * width);
  }
  return sum;
}

/// Fresnel integrals C(x) = int_0^x cos(pi t^2 / 2) dt and S(x) likewise.
struct FresnelCS {
  double c;
  double s;
};
FresnelCS fresnel_cs(double x);

/// F(u) = int_{-inf}^{u} exp(i sign t^2 / 2) dt for sign = +1 or -1.
std::complex<double> fresnel_F(double u, int sign);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hfot
