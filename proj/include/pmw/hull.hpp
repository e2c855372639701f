#pragma once
// Incremental 3D convex hull (O(n^2)) and 2D monotone-chain hull. Sized for
// the few dozen points of a torque-box image; no spatial acceleration.

#include <array>
#include <span>
#include <vector>

#include "pmw/numkernel.hpp"

namespace pmw {

struct HullFace {
  std::array<int, 3> v{};  // counter-clockwise seen from outside
  Vec3 normal = Vec3::Zero();  // unit, outward
  double offset = 0.0;         // normal . x <= offset inside
};

struct ConvexHull3 {
  std::vector<Vec3> points;  // input points, unchanged
  std::vector<HullFace> faces;
  /// Affine dimension of the input (0..3). Faces are empty below 3.
  int dimension = 0;

  /// Indices of points referenced by at least one face, ascending.
  std::vector<int> used_points() const;
};

/// tol is absolute; points within tol of a face plane are not added.
ConvexHull3 convex_hull_3d(std::span<const Vec3> points, double tol);

/// Counter-clockwise hull starting at the lowest-x (then lowest-y) point.
/// Points within weld of each other merge; collinear boundary points are dropped.
std::vector<Vec2> convex_hull_2d(std::vector<Vec2> points, double weld);

}  // namespace pmw
