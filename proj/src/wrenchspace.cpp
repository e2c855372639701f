#include "pmw/wrenchspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include <Eigen/SVD>

#include "pmw/batch_kernels.hpp"

namespace pmw {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Row-major copy for the batch kernels.
std::vector<double> row_major(const Matrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
  return out;
}

}  // namespace

TorqueBox::TorqueBox(double tau_max) : tau_max_(tau_max) {
  if (!(tau_max > 0.0) || !std::isfinite(tau_max))
    throw Error(ErrorCode::InvalidArgument, "torque limit must be positive and finite");
}

double scaling_factor(const Vector& tau_hat, const TorqueBox& box) {
  const double m = tau_hat.cwiseAbs().maxCoeff();
  if (!(m > 0.0)) throw Error(ErrorCode::ZeroTorque, "unit-wrench torque vector is zero");
  return box.tau_max() / m;
}

double ForcePolygon::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    a += cross2(vertices[i], vertices[(i + 1) % vertices.size()]);
  return 0.5 * a;
}

bool ForcePolygon::is_ccw_convex(double tol) const {
  const std::size_t n = vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % n];
    const Vec2& c = vertices[(i + 2) % n];
    const double scale = std::max((b - a).norm() * (c - b).norm(), 1e-300);
    if (cross2(b - a, c - b) < -tol * scale) return false;
  }
  return area() > 0.0;
}

ScalingPolygon polygon_scaling_method(const ManipulatorState& state, const TorqueBox& box, double mz,
                                      std::size_t n_dirs, InverseChoice choice,
                                      const VirtualInertiaDistribution* virt, unsigned threads) {
  if (mz != 0.0)
    throw Error(ErrorCode::InvalidArgument,
                "the scaling method is defined for zero prescribed moment only; use the zonotope slice");
  if (n_dirs < 3) throw Error(ErrorCode::InvalidArgument, "at least three sweep directions are required");

  const Matrix p = wrench_map_inverse(state, choice, virt);
  const Matrix& a = state.wrench_map();
  const std::size_t m = static_cast<std::size_t>(p.rows());
  const std::size_t n = n_dirs;

  std::vector<double> h(3 * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    h[k] = std::cos(theta);
    h[n + k] = std::sin(theta);
  }
  std::vector<double> tau(m * n), peak(n), w(3 * n);

  // Each range [lo, hi) is an independent SoA sub-batch with stride n.
  auto run = [&](std::size_t lo, std::size_t hi) {
    const std::size_t len = hi - lo;
    std::vector<double> hs(3 * len), ts(m * len), ps(len), ws(3 * len);
    for (std::size_t r = 0; r < 3; ++r) std::copy_n(h.begin() + r * n + lo, len, hs.begin() + r * len);
    const auto isa = simd::active_isa();
    simd::map_batch(p, hs, len, ts, isa);
    simd::abs_max_batch(ts, m, len, ps, isa);
    simd::map_batch(a, ts, len, ws, isa);
    for (std::size_t r = 0; r < m; ++r) std::copy_n(ts.begin() + r * len, len, tau.begin() + r * n + lo);
    std::copy_n(ps.begin(), len, peak.begin() + lo);
    for (std::size_t r = 0; r < 3; ++r) std::copy_n(ws.begin() + r * len, len, w.begin() + r * n + lo);
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, n);
  if (workers == 1) {
    run(0, n);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run, n * t / workers, n * (t + 1) / workers);
  }

  ScalingPolygon out;
  out.polygon.mz = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(peak[k] > 0.0)) {
      out.skipped.push_back(k);
      out.warnings.push_back("direction " + std::to_string(k) + " maps to a zero torque vector; skipped");
      continue;
    }
    const double s = box.tau_max() / peak[k];
    out.polygon.vertices.emplace_back(s * w[k], s * w[n + k]);
    out.directions.push_back(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  }
  return out;
}

WrenchZonotope::WrenchZonotope(Matrix generators) : generators_(std::move(generators)) {
  if (generators_.rows() != 3) throw Error(ErrorCode::DimensionMismatch, "zonotope generators must be 3-vectors");
  const auto m = generators_.cols();
  if (m < 1 || m > 16) throw Error(ErrorCode::InvalidArgument, "zonotope needs between 1 and 16 generators");
  if (!generators_.allFinite()) throw Error(ErrorCode::InvalidArgument, "zonotope generators are not finite");

  std::vector<Vec3> corners;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    Vec3 p = Vec3::Zero();
    for (Eigen::Index i = 0; i < m; ++i) p += ((mask >> i) & 1u ? 1.0 : -1.0) * generators_.col(i);
    corners.push_back(p);
  }
  const double scale = std::max(generators_.colwise().norm().sum(), 1e-300);
  const double tol = 1e-12 * scale;
  ConvexHull3 first = convex_hull_3d(corners, tol);

  if (first.dimension == 3) {
    // A hull point is a corner when its incident face normals span R^3;
    // points on zonotope edges or faces are dropped and the hull rebuilt.
    std::vector<Vec3> kept;
    for (int v : first.used_points()) {
      std::vector<Vec3> normals;
      for (const auto& f : first.faces)
        if (std::find(f.v.begin(), f.v.end(), v) != f.v.end()) normals.push_back(f.normal);
      Matrix nm(static_cast<Eigen::Index>(normals.size()), 3);
      for (std::size_t i = 0; i < normals.size(); ++i) nm.row(static_cast<Eigen::Index>(i)) = normals[i].transpose();
      if (numerical_rank(nm, 1e-7) == 3) kept.push_back(first.points[static_cast<std::size_t>(v)]);
    }
    hull_ = convex_hull_3d(kept, tol);
    vertices_ = hull_.points;
  } else {
    hull_.dimension = first.dimension;
    hull_.points = corners;
    // Lower-dimensional: extreme points within the affine hull.
    Eigen::JacobiSVD<Matrix> svd(generators_, Eigen::ComputeFullU);
    const Matrix basis = svd.matrixU().leftCols(std::max(first.dimension, 1));
    if (first.dimension == 0) {
      vertices_ = {Vec3::Zero()};
    } else if (first.dimension == 1) {
      const Vec3 d = basis.col(0);
      const auto [lo, hi] = std::minmax_element(corners.begin(), corners.end(),
                                                [&](const Vec3& x, const Vec3& y) { return d.dot(x) < d.dot(y); });
      vertices_ = {*lo, *hi};
    } else {
      std::vector<Vec2> planar;
      for (const auto& c : corners) planar.emplace_back(basis.col(0).dot(c), basis.col(1).dot(c));
      for (const auto& q : convex_hull_2d(planar, tol)) vertices_.push_back(basis.col(0) * q.x() + basis.col(1) * q.y());
    }
  }

  const std::size_t f = hull_.faces.size();
  face_normals_soa_.resize(3 * f);
  face_offsets_.resize(f);
  for (std::size_t i = 0; i < f; ++i) {
    for (int r = 0; r < 3; ++r) face_normals_soa_[static_cast<std::size_t>(r) * f + i] = hull_.faces[i].normal(r);
    face_offsets_[i] = hull_.faces[i].offset;
  }
}

double WrenchZonotope::support(const Vec3& direction) const {
  return (direction.transpose() * generators_).cwiseAbs().sum();
}

double WrenchZonotope::moment_extent() const { return support(Vec3::UnitZ()); }

double WrenchZonotope::signed_depth(const Vec3& x) const {
  if (hull_.dimension == 3) {
    double depth = std::numeric_limits<double>::infinity();
    for (const auto& f : hull_.faces) depth = std::min(depth, f.offset - f.normal.dot(x));
    return depth;
  }
  // Relative interior counts as depth 0: the set has no volume.
  if (hull_.dimension == 0) return -x.norm();
  Eigen::JacobiSVD<Matrix> svd(generators_, Eigen::ComputeFullU);
  const Matrix basis = svd.matrixU().leftCols(hull_.dimension);
  const Vec3 in_plane = basis * (basis.transpose() * x);
  const double off = (x - in_plane).norm();
  if (hull_.dimension == 1) {
    const double t = basis.col(0).dot(x);
    const double half = support(basis.col(0));
    return -std::hypot(off, std::max(std::abs(t) - half, 0.0));
  }
  ForcePolygon poly;
  for (const auto& v : vertices_) poly.vertices.emplace_back(basis.col(0).dot(v), basis.col(1).dot(v));
  const double d = polygon_signed_distance(poly, Vec2(basis.col(0).dot(x), basis.col(1).dot(x)));
  return d >= 0.0 ? -off : -std::hypot(off, d);
}

std::vector<double> WrenchZonotope::signed_depth_batch(const Matrix& points) const {
  if (points.rows() != 3) throw Error(ErrorCode::DimensionMismatch, "points must be 3 x n");
  const auto n = static_cast<std::size_t>(points.cols());
  std::vector<double> out(n);
  if (hull_.dimension != 3) {
    for (std::size_t k = 0; k < n; ++k) out[k] = signed_depth(points.col(static_cast<Eigen::Index>(k)));
    return out;
  }
  simd::plane_excess_batch(face_normals_soa_, face_offsets_, row_major(points), n, out);
  for (auto& v : out) v = -v;
  return out;
}

WrenchZonotope feasible_zonotope(const ManipulatorState& state, const TorqueBox& box) {
  return WrenchZonotope(state.wrench_map() * box.tau_max());
}

ForcePolygon slice_zonotope(const WrenchZonotope& z, double mz) {
  if (z.dimension() < 3)
    throw Error(ErrorCode::InvalidArgument, "slicing requires a full-dimensional zonotope");
  const double extent = z.moment_extent();
  const double scale = z.generators().colwise().norm().sum();
  const double tol = 1e-12 * scale;
  if (!std::isfinite(mz) || std::abs(mz) > extent + tol)
    throw Error(ErrorCode::EmptyIntersection, "moment " + std::to_string(mz) + " is outside the feasible range [-" +
                                                  std::to_string(extent) + ", " + std::to_string(extent) + "]");

  const auto& pts = z.vertices();
  std::vector<Vec2> cut;
  for (const auto& f : z.faces()) {
    for (int e = 0; e < 3; ++e) {
      const Vec3& a = pts[static_cast<std::size_t>(f.v[e])];
      const Vec3& b = pts[static_cast<std::size_t>(f.v[(e + 1) % 3])];
      const double sa = a.z() - mz, sb = b.z() - mz;
      if (std::abs(sa) <= tol) cut.push_back(a.head<2>());
      if (std::abs(sa) > tol && std::abs(sb) > tol && (sa < 0.0) != (sb < 0.0)) {
        const double t = sa / (sa - sb);
        cut.push_back(a.head<2>() + t * (b.head<2>() - a.head<2>()));
      }
    }
  }
  ForcePolygon poly;
  poly.mz = mz;
  poly.vertices = convex_hull_2d(std::move(cut), 1e-9);
  return poly;
}

PolygonIntersections polygon_intersections(const ForcePolygon& p1, const ForcePolygon& p2) {
  PolygonIntersections out;
  const auto& v1 = p1.vertices;
  const auto& v2 = p2.vertices;
  constexpr double kEdgeTol = 1e-12;
  // Collinear overlaps as (start, end) on p1's boundary; crossings on them are not reported.
  std::vector<std::pair<Vec2, Vec2>> overlaps;
  std::vector<Vec2> crossings;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    const Vec2& a = v1[i];
    const Vec2 r = v1[(i + 1) % v1.size()] - a;
    for (std::size_t j = 0; j < v2.size(); ++j) {
      const Vec2& c = v2[j];
      const Vec2 s = v2[(j + 1) % v2.size()] - c;
      const double denom = cross2(r, s);
      const Vec2 ac = c - a;
      if (std::abs(cross2(r, ac)) <= 1e-9 * r.norm() && std::abs(cross2(r, ac + s)) <= 1e-9 * r.norm()) {
        const double rr = r.squaredNorm();
        const double t0 = ac.dot(r) / rr;
        const double t1 = (ac + s).dot(r) / rr;
        const double lo = std::max(std::min(t0, t1), 0.0), hi = std::min(std::max(t0, t1), 1.0);
        if (hi - lo > 1e-9) {
          out.shared_boundary = true;
          overlaps.emplace_back(a + lo * r, a + hi * r);
        }
        continue;
      }
      if (std::abs(denom) <= 1e-12 * r.norm() * s.norm()) continue;
      const double t = cross2(ac, s) / denom;
      const double u = cross2(ac, r) / denom;
      if (t < -kEdgeTol || t > 1.0 + kEdgeTol || u < -kEdgeTol || u > 1.0 + kEdgeTol) continue;
      crossings.push_back(a + t * r);
    }
  }
  for (const Vec2& x : crossings) {
    const bool on_overlap = std::any_of(overlaps.begin(), overlaps.end(), [&](const auto& seg) {
      const Vec2 d = seg.second - seg.first;
      const double t = std::clamp((x - seg.first).dot(d) / d.squaredNorm(), 0.0, 1.0);
      return (x - seg.first - t * d).norm() <= 1e-6;
    });
    const bool dup = std::any_of(out.points.begin(), out.points.end(),
                                 [&](const Vec2& q) { return (q - x).norm() <= 1e-6; });
    if (!on_overlap && !dup) out.points.push_back(x);
  }
  return out;
}

double polygon_signed_distance(const ForcePolygon& poly, const Vec2& x) {
  const auto& v = poly.vertices;
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "empty polygon");
  double dist = std::numeric_limits<double>::infinity();
  bool inside = v.size() >= 3;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2 e = v[(i + 1) % v.size()] - a;
    const double len2 = e.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((x - a).dot(e) / len2, 0.0, 1.0) : 0.0;
    dist = std::min(dist, (x - a - t * e).norm());
    if (cross2(e, x - a) < 0.0) inside = false;
  }
  return inside ? dist : -dist;
}

double polygon_radius(const ForcePolygon& poly, const Vec2& direction) {
  const Vec2 d = direction.normalized();
  const auto& v = poly.vertices;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2 e = v[(i + 1) % v.size()] - a;
    const double denom = cross2(d, e);
    if (std::abs(denom) <= 1e-15 * e.norm()) continue;
    const double lambda = cross2(a, e) / denom;
    const double u = cross2(a, d) / denom;
    if (lambda > 0.0 && u >= -1e-12 && u <= 1.0 + 1e-12) best = std::min(best, lambda);
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::InvalidArgument, "ray does not meet the polygon boundary");
  return best;
}

}  // namespace pmw
