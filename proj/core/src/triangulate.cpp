#include "anivem/mesh.hpp"

#include <cmath>
#include <limits>

namespace anivem {

namespace {

double angle_between(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

double largest_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  return std::max({angle_between(b - a, c - a), angle_between(a - b, c - b), angle_between(a - c, b - c)});
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r,
                    const Eigen::Vector2d& s, double tol) {
  const double d1 = cross2(q - p, r - p), d2 = cross2(q - p, s - p);
  const double d3 = cross2(s - r, p - r), d4 = cross2(s - r, q - r);
  return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

struct Fan {
  std::vector<std::array<int, 3>> tris;
  double worst = std::numeric_limits<double>::infinity();
};

// Best fan of the sub-polygon given by loop positions `part` (in loop order).
Fan best_fan(const std::vector<int>& part, const std::vector<Vec3>& pts, const std::vector<Eigen::Vector2d>& uv,
             double min_area) {
  Fan best;
  const int m = static_cast<int>(part.size());
  if (m == 3) {
    best.tris.push_back({part[0], part[1], part[2]});
    best.worst = largest_angle(pts[part[0]], pts[part[1]], pts[part[2]]);
    return best;
  }
  for (int j = 0; j < m; ++j) {
    Fan f;
    f.worst = 0;
    bool valid = true;
    for (int i = 1; i + 1 < m && valid; ++i) {
      int a = part[j], b = part[(j + i) % m], c = part[(j + i + 1) % m];
      if (0.5 * cross2(uv[b] - uv[a], uv[c] - uv[a]) <= min_area) valid = false;
      f.tris.push_back({a, b, c});
      f.worst = std::max(f.worst, largest_angle(pts[a], pts[b], pts[c]));
    }
    if (valid && f.worst < best.worst) best = std::move(f);
  }
  if (best.tris.empty()) throw GeometryError("polygon cannot be fanned from any vertex");
  return best;
}

} // namespace

std::vector<std::array<int, 3>> triangulate_face(const std::vector<Vec3>& polygon,
                                                 std::optional<std::pair<int, int>> chord) {
  const int n = static_cast<int>(polygon.size());
  if (n < 3) throw GeometryError("polygon needs at least 3 vertices");
  if (n > 8) throw GeometryError("polygon has more than 8 vertices");
  double h = 0;
  for (const auto& p : polygon)
    for (const auto& q : polygon) h = std::max(h, (p - q).norm());
  const Vec3 av = polygon_area_vector(polygon);
  if (av.norm() <= 1e-14 * h * h) throw GeometryError("degenerate polygon");
  const Vec3 nrm = av.normalized();
  for (const auto& p : polygon)
    if (std::abs((p - polygon[0]).dot(nrm)) > 1e-10 * h) throw GeometryError("non-planar polygon");

  Vec3 e1 = (std::abs(nrm.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(nrm).normalized();
  Vec3 e2 = nrm.cross(e1);
  std::vector<Eigen::Vector2d> uv;
  for (const auto& p : polygon) uv.emplace_back((p - polygon[0]).dot(e1), (p - polygon[0]).dot(e2));
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(uv[i], uv[i + 1], uv[j], uv[(j + 1) % n], 1e-14 * h * h))
        throw GeometryError("self-intersecting polygon");
    }

  const double min_area = 1e-14 * h * h;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  if (!chord) return best_fan(all, polygon, uv, min_area).tris;

  auto [a, b] = *chord;
  if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw GeometryError("invalid chord");
  if ((a + 1) % n == b || (b + 1) % n == a) return best_fan(all, polygon, uv, min_area).tris;
  std::vector<int> p1, p2;
  for (int i = a;; i = (i + 1) % n) {
    p1.push_back(i);
    if (i == b) break;
  }
  for (int i = b;; i = (i + 1) % n) {
    p2.push_back(i);
    if (i == a) break;
  }
  auto tris = best_fan(p1, polygon, uv, min_area).tris;
  auto more = best_fan(p2, polygon, uv, min_area).tris;
  tris.insert(tris.end(), more.begin(), more.end());
  return tris;
}

} // namespace anivem
