#include "pmw/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace pmw {

std::vector<int> ConvexHull3::used_points() const {
  std::set<int> used;
  for (const auto& f : faces) used.insert(f.v.begin(), f.v.end());
  return {used.begin(), used.end()};
}

namespace {

HullFace make_face(const std::vector<Vec3>& p, int a, int b, int c) {
  HullFace f;
  f.v = {a, b, c};
  f.normal = (p[b] - p[a]).cross(p[c] - p[a]).normalized();
  f.offset = f.normal.dot(p[a]);
  return f;
}

double distance_to_line(const Vec3& x, const Vec3& a, const Vec3& b) {
  return (x - a).cross(b - a).norm() / (b - a).norm();
}

}  // namespace

ConvexHull3 convex_hull_3d(std::span<const Vec3> points, double tol) {
  ConvexHull3 hull;
  hull.points.assign(points.begin(), points.end());
  const auto& p = hull.points;
  const int n = static_cast<int>(p.size());
  if (n == 0) return hull;

  // Initial simplex from successive farthest points.
  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (p[i].x() < p[i0].x() || (p[i].x() == p[i0].x() && p[i].y() < p[i0].y())) i0 = i;
  int i1 = -1;
  double best = tol;
  for (int i = 0; i < n; ++i)
    if (double d = (p[i] - p[i0]).norm(); d > best) best = d, i1 = i;
  if (i1 < 0) return hull;
  hull.dimension = 1;
  int i2 = -1;
  best = tol;
  for (int i = 0; i < n; ++i)
    if (double d = distance_to_line(p[i], p[i0], p[i1]); d > best) best = d, i2 = i;
  if (i2 < 0) return hull;
  hull.dimension = 2;
  const Vec3 nrm = (p[i1] - p[i0]).cross(p[i2] - p[i0]).normalized();
  int i3 = -1;
  best = tol;
  for (int i = 0; i < n; ++i)
    if (double d = std::abs(nrm.dot(p[i] - p[i0])); d > best) best = d, i3 = i;
  if (i3 < 0) return hull;
  hull.dimension = 3;

  auto& faces = hull.faces;
  if (nrm.dot(p[i3] - p[i0]) > 0.0) std::swap(i1, i2);  // i3 must lie behind (i0, i1, i2)
  faces.push_back(make_face(p, i0, i1, i2));
  faces.push_back(make_face(p, i0, i3, i1));
  faces.push_back(make_face(p, i1, i3, i2));
  faces.push_back(make_face(p, i2, i3, i0));

  for (int q = 0; q < n; ++q) {
    if (q == i0 || q == i1 || q == i2 || q == i3) continue;
    std::vector<char> visible(faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (faces[f].normal.dot(p[q]) - faces[f].offset > tol) visible[f] = 1, any = true;
    if (!any) continue;

    // Directed edges of visible faces; an edge is on the horizon when its
    // reverse does not belong to another visible face.
    std::set<std::pair<int, int>> vis_edges;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (visible[f])
        for (int e = 0; e < 3; ++e) vis_edges.insert({faces[f].v[e], faces[f].v[(e + 1) % 3]});
    std::vector<HullFace> next;
    std::vector<std::pair<int, int>> horizon;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) {
        next.push_back(faces[f]);
        continue;
      }
      for (int e = 0; e < 3; ++e) {
        const int a = faces[f].v[e], b = faces[f].v[(e + 1) % 3];
        if (!vis_edges.contains({b, a})) horizon.emplace_back(a, b);
      }
    }
    for (const auto& [a, b] : horizon) next.push_back(make_face(p, a, b, q));
    faces = std::move(next);
  }
  return hull;
}

std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts, double weld) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  std::vector<Vec2> uniq;
  for (const auto& q : pts) {
    bool dup = false;
    for (const auto& u : uniq)
      if ((u - q).norm() <= weld) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(q);
  }
  if (uniq.size() < 3) return uniq;

  // Collinearity is judged by distance from the middle point to the chord.
  auto turns_left = [weld](const Vec2& o, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - o;
    const double cross = ab.x() * (a.y() - o.y()) - ab.y() * (a.x() - o.x());
    return -cross > weld * ab.norm();
  };
  std::vector<Vec2> h(2 * uniq.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    while (k >= 2 && !turns_left(h[k - 2], h[k - 1], uniq[i])) --k;
    h[k++] = uniq[i];
  }
  for (std::size_t i = uniq.size() - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && !turns_left(h[k - 2], h[k - 1], uniq[i])) --k;
    h[k++] = uniq[i];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace pmw
