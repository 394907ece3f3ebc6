#pragma once

#include <cstddef>

#include "hfot/vec2.hpp"

namespace hfot {

/// Disk B_r with a detector standoff D; scatterers live in B_{r-2D}.
struct DiskDomain {
  double r = 1.0;
  double D = 0.2;

  DiskDomain() = default;
  DiskDomain(double radius, double standoff);

  double diameter() const { return 2.0 * r; }
  /// Largest |s| of the restricted line set.
  double s_max() const { return r - D; }
  /// Radius of the region that may carry scatterers.
  double support_radius() const { return r - 2.0 * D; }
};

/// Line {s theta_perp + t theta_hat}.
struct ParallelCoord {
  double s = 0.0;
  double theta = 0.0;
};

/// Emitter/detector pair of a line.
struct BoundaryPair {
  Vec2 x0;
  Vec2 xc;
  Vec2 e0;
  double d0 = 0.0;
};

BoundaryPair boundary_points(ParallelCoord c, const DiskDomain& d);

/// Smooth cutoff: 1 for |s| <= r - 2D, 0 for |s| >= r - D.
double chi(double s, const DiskDomain& d);

/// First and second partials of x0(s, theta) and xc(s, theta).
struct BoundaryJacobians {
  Vec2 x0_s, x0_t, xc_s, xc_t;
  Vec2 x0_ss, x0_st, x0_tt;
  Vec2 xc_ss, xc_st, xc_tt;
};

BoundaryJacobians boundary_jacobians(ParallelCoord c, const DiskDomain& d);

/// Angle reduced to [0, 2 pi).
double wrap_angle(double t);
/// Distance between two angles on the circle, in [0, pi].
double angle_distance(double a, double b);

/// Midpoint sampling of the restricted line set:
/// s_i = -(r - D) + (i + 1/2) ds and theta_j = j dtheta, stored s-major.
struct SinogramGrid {
  int n_s = 0;
  int n_theta = 0;
  double s_max = 0.0;

  SinogramGrid() = default;
  SinogramGrid(int ns, int ntheta, const DiskDomain& d);

  double ds() const { return 2.0 * s_max / n_s; }
  double dtheta() const;
  double s(int i) const { return -s_max + (i + 0.5) * ds(); }
  double theta(int j) const { return j * dtheta(); }
  std::size_t size() const { return static_cast<std::size_t>(n_s) * static_cast<std::size_t>(n_theta); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_theta) + static_cast<std::size_t>(j);
  }
  ParallelCoord coord(std::size_t idx) const;
};

}  // namespace hfot
