#pragma once
// Feasible planar wrench sets under symmetric torque limits |tau_i| <= tau_max:
// scaling-factor polygons per pseudo-inverse, the exact zonotope image of the
// torque box, and constant-moment slices of it.

#include <optional>
#include <string>
#include <vector>

#include "pmw/hull.hpp"
#include "pmw/rrr_model.hpp"
#include "pmw/synthesis.hpp"

namespace pmw {

class TorqueBox {
 public:
  explicit TorqueBox(double tau_max);
  double tau_max() const noexcept { return tau_max_; }

 private:
  double tau_max_;
};

/// tau_max / max_i |tau_hat_i|; ZeroTorque for a zero vector.
double scaling_factor(const Vector& tau_hat, const TorqueBox& box);

/// Closed convex polygon in the (fx, fy) plane, counter-clockwise, at moment mz.
struct ForcePolygon {
  std::vector<Vec2> vertices;
  double mz = 0.0;

  double area() const;
  bool is_ccw_convex(double tol = 1e-9) const;
};

struct ScalingPolygon {
  ForcePolygon polygon;
  std::vector<double> directions;        // angle of each kept vertex, rad
  std::vector<std::size_t> skipped;      // direction indices with zero tau_hat
  std::vector<std::string> warnings;
};

/// Sweeps theta_k = 2 pi k / n_dirs: tau_hat = P (cos, sin, 0), scaled to the
/// first saturating actuator; vertex k is the force part of S_k A tau_hat.
/// Requires mz == 0 and n_dirs >= 3. `virt` is needed for Manipulating.
/// With threads > 1 contiguous direction ranges run concurrently; the output
/// is bitwise identical to the single-threaded sweep.
ScalingPolygon polygon_scaling_method(const ManipulatorState& state, const TorqueBox& box, double mz,
                                      std::size_t n_dirs, InverseChoice choice,
                                      const VirtualInertiaDistribution* virt = nullptr, unsigned threads = 1);

class WrenchZonotope {
 public:
  /// generators is 3 x m; the set is { sum c_i g_i : |c_i| <= 1 }.
  explicit WrenchZonotope(Matrix generators);

  const Matrix& generators() const noexcept { return generators_; }
  int dimension() const noexcept { return hull_.dimension; }
  /// Corners only; points on edges or faces of the zonotope are excluded.
  const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
  /// Triangulated boundary over vertices() (empty below dimension 3).
  const std::vector<HullFace>& faces() const noexcept { return hull_.faces; }

  /// Support function h(n) = sum_i |n . g_i|.
  double support(const Vec3& direction) const;
  /// Positive inside: min over faces of (offset - n . x). Below dimension 3
  /// the result is minus the distance to the affine hull when off it.
  double signed_depth(const Vec3& x) const;
  /// signed_depth for a batch of points (3 x n), using the SIMD kernel.
  std::vector<double> signed_depth_batch(const Matrix& points) const;
  /// Extent of the third (moment) coordinate: [-h(e_z), h(e_z)].
  double moment_extent() const;

 private:
  Matrix generators_;
  ConvexHull3 hull_;
  std::vector<Vec3> vertices_;
  std::vector<double> face_normals_soa_;
  std::vector<double> face_offsets_;
};

/// Zonotope of A tau over the torque box.
WrenchZonotope feasible_zonotope(const ManipulatorState& state, const TorqueBox& box);

/// Intersection of the zonotope with {mz = const} projected to (fx, fy).
/// EmptyIntersection when mz lies outside the moment extent.
ForcePolygon slice_zonotope(const WrenchZonotope& z, double mz);

struct PolygonIntersections {
  std::vector<Vec2> points;
  bool shared_boundary = false;  // some edge pair overlaps collinearly
};

/// Boundary-boundary crossings, deduplicated within 1e-6. Collinear overlaps
/// set shared_boundary instead of producing points.
PolygonIntersections polygon_intersections(const ForcePolygon& p1, const ForcePolygon& p2);

/// Euclidean distance to the boundary, positive inside, negative outside.
double polygon_signed_distance(const ForcePolygon& poly, const Vec2& x);

/// Distance from the origin to the boundary along the ray through `direction`.
/// Requires the origin inside the polygon.
double polygon_radius(const ForcePolygon& poly, const Vec2& direction);

}  // namespace pmw
