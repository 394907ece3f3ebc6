#include <cmath>

#include "doctest.h"
#include "hfot/errors.hpp"
#include "hfot/fields.hpp"
#include "hfot/quadrature.hpp"
#include "oracles.hpp"

using namespace hfot;

TEST_CASE("bilinear interpolation reproduces affine fields") {
  const Lattice lat(16, 1.0);
  const ScalarField f = ScalarField::sample(lat, [](Vec2 x) { return 0.3 + 2.0 * x.x - 0.7 * x.y; }, 1.0);
  for (Vec2 p : {Vec2{0.013, -0.4}, Vec2{-0.77, 0.31}, Vec2{0.5, 0.5}})
    CHECK(f(p) == doctest::Approx(0.3 + 2.0 * p.x - 0.7 * p.y).epsilon(1e-13));
  CHECK(lat.nodes() == 17);
  CHECK(lat.coord(8) == doctest::Approx(0.0));
}

TEST_CASE("constant extinction gives the exponential of the distance") {
  const Lattice lat(8, 1.0);
  const ScalarField sigma = ScalarField::constant(lat, 0.3);
  const Vec2 a{-0.5, 0.2}, b{0.4, -0.3};
  CHECK(attenuation(a, b, sigma, 4) == doctest::Approx(std::exp(-0.3 * norm(b - a))).epsilon(1e-14));
  CHECK_THROWS_AS(attenuation(a, {1.2, 0.0}, sigma, 4), DomainError);
  CHECK_THROWS_AS(attenuation(a, b, sigma, 1), DomainError);
}

TEST_CASE("variable extinction matches adaptive quadrature of the line integral") {
  const Lattice lat(256, 1.0);
  auto sig = [](Vec2 x) { return 0.2 + 0.1 * std::cos(2.0 * x.x) * std::exp(-x.y * x.y); };
  const ScalarField sigma = ScalarField::sample(lat, sig, 1.0);
  const Vec2 a{-0.6, 0.1}, b{0.5, 0.4};
  const double L = norm(b - a);
  const double ref = oracle::simpson<double>([&](double t) { return sig(a + (t / L) * (b - a)); }, 0.0, L, 1e-13);
  CHECK(attenuation(a, b, sigma, 64) == doctest::Approx(std::exp(-ref)).epsilon(1e-5));
  const DiskDomain d(1.0, 0.2);
  const ParallelCoord c{0.3, 1.1};
  const BoundaryPair bp = boundary_points(c, d);
  CHECK(std::exp(-radon_sigma(c, sigma, d)) == doctest::Approx(attenuation(bp.x0, bp.xc, sigma, 256)).epsilon(1e-6));
}

TEST_CASE("phase functions are normalised over the circle") {
  for (const PhaseFunction& phi : {PhaseFunction::isotropic(), PhaseFunction::truncated_cosine(0.6)}) {
    const Vec2 in = direction(0.4);
    const double total =
        oracle::simpson<double>([&](double t) { return phi(in, direction(t)); }, 0.0, 2.0 * kPi, 1e-12);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(phi.sup_norm() >= phi(in, direction(1.0)));
  }
}

TEST_CASE("phantoms outside the admissible support are rejected") {
  const DiskDomain d(1.0, 0.2);
  PhantomSpec spec;
  PhantomComponent c;
  c.kind = "bump";
  c.center = {0.4, 0.0};
  c.radius = 0.3;
  spec.components = {c};
  CHECK_THROWS_AS(Phantom(spec, d), ConfigError);
  spec.components[0].center = {0.2, 0.0};
  const Phantom ok(spec, d);
  CHECK(ok.support_radius() <= 0.6 + 1e-12);
  CHECK(ok({0.2, 0.0}) > 0.0);
  CHECK(ok({0.55, 0.0}) == 0.0);
}

TEST_CASE("phantom rescaling pins sup k rho") {
  const DiskDomain d(1.0, 0.2);
  PhantomSpec spec;
  PhantomComponent c;
  c.center = {0.1, 0.05};
  c.radius = 0.3;
  c.amplitude = 3.0;
  spec.components = {c};
  spec.krho_max = 0.25;
  const Phantom p(spec, d);
  double peak = 0.0;
  for (int iy = -200; iy <= 200; ++iy)
    for (int ix = -200; ix <= 200; ++ix) {
      const Vec2 x{0.1 + 0.3 * ix / 200.0, 0.05 + 0.3 * iy / 200.0};
      peak = std::max(peak, p(x) * rho_weight(x, 1.0));
    }
  CHECK(peak == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("sup norms respect the disk restriction") {
  const Lattice lat(20, 1.0);
  ScalarField f(lat, 0.0);
  f.values()[lat.index(0, 0)] = 5.0;  // corner, outside the unit disk
  f.values()[lat.index(10, 10)] = 1.0;
  CHECK(sup_norm(f, 0.9) == 1.0);
  CHECK(sup_norm(f, 2.0) == 5.0);
}
