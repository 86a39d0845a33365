#include "anivem/geomcheck.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

namespace anivem {

using std::numbers::pi;

namespace {

double angle_between(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

// Closest point on a triangle (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + d1 / (d1 - d3) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

bool in_tet(const Vec3& x, const std::array<Vec3, 4>& t) {
  const double vol = tet_signed_volume(t[0], t[1], t[2], t[3]);
  const double tol = -1e-12 * std::abs(vol);
  for (int k = 0; k < 4; ++k) {
    auto s = t;
    s[k] = x;
    if (tet_signed_volume(s[0], s[1], s[2], s[3]) * (vol > 0 ? 1 : -1) < tol) return false;
  }
  return true;
}

} // namespace

TriangleAngles tri_angles(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double h = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  if (triangle_area(a, b, c) < 1e-14 * h * h) throw GeometryError("degenerate triangle");
  TriangleAngles r;
  r.at = {angle_between(b - a, c - a), angle_between(a - b, c - b), angle_between(a - c, b - c)};
  r.min = *std::min_element(r.at.begin(), r.at.end());
  r.max = *std::max_element(r.at.begin(), r.at.end());
  return r;
}

BoundarySurface cell_surface(const PolyMesh& mesh, CellId c) {
  BoundarySurface s;
  s.ids = mesh.cell_vertices(c);
  std::map<VertexId, int> local;
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    local[s.ids[i]] = static_cast<int>(i);
    s.points.push_back(mesh.vertex(s.ids[i]));
  }
  for (const auto& t : mesh.cell_triangles(c)) s.tris.push_back({local[t.v[0]], local[t.v[1]], local[t.v[2]]});
  return s;
}

//--------------------------------------------------------------------------------
// Path and isotropy conditions
//--------------------------------------------------------------------------------

PathCheck check_A2(const BoundarySurface& s, double eps) {
  PathCheck out;
  const int nv = static_cast<int>(s.points.size());
  if (s.tris.empty()) return out;
  double best_area = -1;
  std::map<std::pair<int, int>, bool> admissible;
  for (std::size_t t = 0; t < s.tris.size(); ++t) {
    const auto& T = s.tris[t];
    const double area = triangle_area(s.points[T[0]], s.points[T[1]], s.points[T[2]]);
    if (area > best_area) {
      best_area = area;
      out.largest_triangle = static_cast<int>(t);
    }
    const auto ang = tri_angles(s.points[T[0]], s.points[T[1]], s.points[T[2]]);
    for (int k = 0; k < 3; ++k) {
      const int a = T[(k + 1) % 3], b = T[(k + 2) % 3];
      bool& flag = admissible[{std::min(a, b), std::max(a, b)}];
      flag = flag || ang.at[k] <= (1 + eps) * ang.min;
    }
  }
  std::vector<std::vector<int>> adj(nv);
  for (const auto& [e, ok] : admissible)
    if (ok) {
      adj[e.first].push_back(e.second);
      adj[e.second].push_back(e.first);
    }
  std::vector<int> parent(nv, -2);
  std::queue<int> q;
  for (int v : s.tris[out.largest_triangle]) {
    if (parent[v] == -2) q.push(v);
    parent[v] = -1;
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (parent[w] == -2) {
        parent[w] = v;
        q.push(w);
      }
  }
  out.paths.resize(nv);
  out.ok = true;
  for (int v = 0; v < nv; ++v) {
    if (parent[v] == -2) {
      out.ok = false;
      out.unreached.push_back(s.ids[v]);
      continue;
    }
    for (int w = v; w != -1; w = parent[w]) out.paths[v].push_back(s.ids[w]);
  }
  return out;
}

PathCheck check_A2(const PolyMesh& mesh, CellId c, double eps) { return check_A2(cell_surface(mesh, c), eps); }

double a2prime_epsilon(double theta_max, double theta_min, double rho) {
  return theta_max / std::asin(rho * std::sin(theta_min) * std::sin(theta_max));
}

IsotropyCheck check_A2prime(const BoundarySurface& s, double theta_min, double rho) {
  const std::size_t nt = s.tris.size();
  std::vector<double> diam(nt);
  std::vector<char> good(nt);
  double theta_max = 0;
  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& T = s.tris[t];
    const auto ang = tri_angles(s.points[T[0]], s.points[T[1]], s.points[T[2]]);
    theta_max = std::max(theta_max, ang.max);
    diam[t] = std::max({(s.points[T[0]] - s.points[T[1]]).norm(), (s.points[T[1]] - s.points[T[2]]).norm(),
                        (s.points[T[2]] - s.points[T[0]]).norm()});
    good[t] = ang.min >= theta_min;
    for (int k = 0; k < 3; ++k) {
      int a = T[k], b = T[(k + 1) % 3];
      edge_tris[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(t));
    }
  }
  IsotropyCheck out;
  out.ok = true;
  for (std::size_t t = 0; t < nt && out.ok; ++t) {
    const auto& T = s.tris[t];
    bool found = false;
    for (int k = 0; k < 3 && !found; ++k) {
      int a = T[k], b = T[(k + 1) % 3];
      for (int u : edge_tris[{std::min(a, b), std::max(a, b)}])
        if (good[u] && diam[u] >= rho * diam[t]) found = true;
    }
    out.ok = found;
  }
  if (out.ok) out.eps = a2prime_epsilon(theta_max, theta_min, rho);
  return out;
}

IsotropyCheck check_A2prime(const PolyMesh& mesh, CellId c, double theta_min, double rho) {
  return check_A2prime(cell_surface(mesh, c), theta_min, rho);
}

double kappa(double theta_max, double eps) {
  if (!(theta_max < pi)) throw GeometryError("maximum angle must be below pi");
  if (eps < 0) throw GeometryError("eps must be non-negative");
  return std::sqrt(2.0) / std::sin((pi - theta_max) / (2 + eps));
}

namespace {
double max_angle(const BoundarySurface& s) {
  double m = 0;
  for (const auto& T : s.tris) m = std::max(m, tri_angles(s.points[T[0]], s.points[T[1]], s.points[T[2]]).max);
  return m;
}
double min_angle(const BoundarySurface& s) {
  double m = pi;
  for (const auto& T : s.tris) m = std::min(m, tri_angles(s.points[T[0]], s.points[T[1]], s.points[T[2]]).min);
  return m;
}
} // namespace

double poincare_bound(const PolyMesh& mesh, CellId c, double eps) {
  const auto s = cell_surface(mesh, c);
  if (!check_A2(s, eps).ok)
    throw GeometryError("cell " + std::to_string(c) + " fails the path condition for eps = " + std::to_string(eps));
  return std::sqrt(5.0) * kappa(max_angle(s), eps) * mesh.cell(c).diameter * std::sqrt(double(s.tris.size()));
}

//--------------------------------------------------------------------------------
// Inscribed ball and degeneracy
//--------------------------------------------------------------------------------

double inscribed_ratio(const PolyMesh& mesh, CellId c) {
  const auto tris = mesh.cell_triangles(c);
  std::vector<std::array<Vec3, 4>> tets;
  for (const SubTet& t : mesh.cell(c).subtets) tets.push_back(mesh.subtet_points(t));
  auto dist = [&](const Vec3& x) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& t : tris) {
      const Vec3 p = closest_on_triangle(x, mesh.vertex(t.v[0]), mesh.vertex(t.v[1]), mesh.vertex(t.v[2]));
      d = std::min(d, (x - p).norm());
    }
    return d;
  };
  auto inside = [&](const Vec3& x) {
    return std::any_of(tets.begin(), tets.end(), [&](const auto& t) { return in_tet(x, t); });
  };
  Vec3 best = Vec3::Zero();
  double best_d = -1;
  for (const auto& t : tets) {
    const Vec3 g = 0.25 * (t[0] + t[1] + t[2] + t[3]);
    const double d = dist(g);
    if (d > best_d) {
      best_d = d;
      best = g;
    }
  }
  const double hK = mesh.cell(c).diameter;
  double step = hK / 8;
  for (int it = 0; it < 20; ++it) {
    bool moved = false;
    for (int k = 0; k < 3; ++k)
      for (double sgn : {1.0, -1.0}) {
        Vec3 x = best;
        x[k] += sgn * step;
        if (!inside(x)) continue;
        const double d = dist(x);
        if (d > best_d) {
          best_d = d;
          best = x;
          moved = true;
        }
      }
    if (!moved) step *= 0.5;
  }
  return best_d / hK;
}

double degeneracy_constant(double theta_max) {
  const double a = std::min(std::sqrt(3.0) / 2, std::sin(theta_max));
  const double b = std::min(std::cos(theta_max / 2), std::sin(theta_max));
  return a * b * b;
}

double best_edge_determinant(const std::vector<Vec3>& directions) {
  std::vector<Vec3> u;
  for (const auto& d : directions) u.push_back(d.normalized());
  double best = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      const Vec3 cij = u[i].cross(u[j]);
      for (std::size_t k = j + 1; k < u.size(); ++k) best = std::max(best, std::abs(cij.dot(u[k])));
    }
  return best;
}

Degeneracy degeneracy(const PolyMesh& mesh, CellId c) {
  std::vector<Vec3> dirs;
  for (const auto& [a, b] : mesh.cell_edges(c)) {
    const Vec3 d = (mesh.vertex(b) - mesh.vertex(a)).normalized();
    bool parallel = false;
    for (const auto& e : dirs) parallel = parallel || e.cross(d).norm() < 1e-12;
    if (!parallel) dirs.push_back(d);
  }
  Degeneracy out;
  out.best_det = best_edge_determinant(dirs);
  out.c_m = degeneracy_constant(max_angle(cell_surface(mesh, c)));
  return out;
}

double tet_max_angle(const std::array<Vec3, 4>& t) {
  static constexpr int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  double m = 0;
  for (const auto& f : faces) m = std::max(m, tri_angles(t[f[0]], t[f[1]], t[f[2]]).max);
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      int o[2], k = 0;
      for (int v = 0; v < 4; ++v)
        if (v != a && v != b) o[k++] = v;
      const Vec3 e = (t[b] - t[a]).normalized();
      Vec3 p = t[o[0]] - t[a], q = t[o[1]] - t[a];
      p -= p.dot(e) * e;
      q -= q.dot(e) * e;
      m = std::max(m, angle_between(p, q));
    }
  return m;
}

double cotangent_energy(const std::array<Vec3, 3>& t, const Vec3& values) {
  const auto ang = tri_angles(t[0], t[1], t[2]);
  const double a = (t[1] - t[2]).norm(), b = (t[2] - t[0]).norm(), c = (t[0] - t[1]).norm();
  const double R = a * b * c / (4 * triangle_area(t[0], t[1], t[2]));
  double s = 0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double len = (t[k] - t[j]).norm();
    const double dv = (values[k] - values[j]) / len;
    s += std::cos(ang.at[i]) * len * dv * dv;
  }
  return R * s;
}

double gradient_energy(const std::array<Vec3, 3>& t, const Vec3& values) {
  const Vec3 n2 = (t[1] - t[0]).cross(t[2] - t[0]);
  const double twice_area = n2.norm();
  const Vec3 n = n2 / twice_area;
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < 3; ++i) g += values[i] * n.cross(t[(i + 2) % 3] - t[(i + 1) % 3]) / twice_area;
  return 0.5 * twice_area * g.squaredNorm();
}

//--------------------------------------------------------------------------------
// Interface strip
//--------------------------------------------------------------------------------

StripCheck check_A5(const LevelSet& phi, const PolyMesh& mesh, double C) {
  static const double samples[10][3] = {{1, 0, 0},       {0, 1, 0},       {0, 0, 1},         {.5, .5, 0},
                                        {0, .5, .5},     {.5, 0, .5},     {1. / 3, 1. / 3, 1. / 3},
                                        {2. / 3, 1. / 6, 1. / 6}, {1. / 6, 2. / 3, 1. / 6}, {1. / 6, 1. / 6, 2. / 3}};
  StripCheck out;
  for (CellId c = 0; c < static_cast<CellId>(mesh.num_cells()); ++c) {
    const Cell& cell = mesh.cell(c);
    if (!cell.iface) continue;
    const auto& poly = cell.iface->polygon;
    const double h2 = cell.diameter * cell.diameter;
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
      const Vec3 &a = mesh.vertex(poly[0]), &b = mesh.vertex(poly[i]), &d = mesh.vertex(poly[i + 1]);
      for (const auto& s : samples) {
        const Vec3 x = s[0] * a + s[1] * b + s[2] * d;
        const double g = phi.gradient(x).norm();
        if (g < 1e-8) throw GeometryError("level-set gradient vanishes near cell " + std::to_string(c));
        const double dist = std::abs(phi.value(x)) / g;
        out.max_distance = std::max(out.max_distance, dist);
        out.worst_ratio = std::max(out.worst_ratio, dist / h2);
      }
    }
  }
  out.ok = out.worst_ratio <= C;
  return out;
}

//--------------------------------------------------------------------------------
// Report
//--------------------------------------------------------------------------------

ShapeReport shape_report(const PolyMesh& mesh, CellId c, const ShapeOptions& opt) {
  ShapeReport r;
  r.cell = c;
  const auto s = cell_surface(mesh, c);
  r.theta_max = max_angle(s);
  r.theta_min = min_angle(s);
  r.n_triangles = static_cast<int>(s.tris.size());
  const auto a2 = check_A2(s, opt.eps);
  r.a2_ok = a2.ok;
  if (opt.with_paths) r.a2_paths = a2.paths;
  const auto a2p = check_A2prime(s, opt.theta_min, opt.rho);
  r.a2prime_ok = a2p.ok;
  r.eps_a2prime = a2p.ok ? a2p.eps : std::numeric_limits<double>::quiet_NaN();
  r.eps = opt.eps;
  r.kappa = kappa(r.theta_max, opt.eps);
  r.poincare_bound = a2.ok ? std::sqrt(5.0) * r.kappa * mesh.cell(c).diameter * std::sqrt(double(r.n_triangles))
                           : std::numeric_limits<double>::quiet_NaN();
  r.inscribed_ratio = inscribed_ratio(mesh, c);
  r.degeneracy = degeneracy(mesh, c);
  return r;
}

namespace {
nlohmann::ordered_json report_json(const ShapeReport& r) {
  nlohmann::ordered_json j;
  j["cell"] = r.cell;
  j["theta_max"] = r.theta_max;
  j["theta_min"] = r.theta_min;
  j["n_triangles"] = r.n_triangles;
  j["a2_ok"] = r.a2_ok;
  if (!r.a2_paths.empty()) j["a2_paths"] = r.a2_paths;
  j["a2prime_ok"] = r.a2prime_ok;
  j["eps"] = r.eps;
  j["eps_a2prime"] = r.eps_a2prime;
  j["kappa"] = r.kappa;
  j["poincare_bound"] = r.poincare_bound;
  j["inscribed_ratio"] = r.inscribed_ratio;
  j["best_det"] = r.degeneracy.best_det;
  j["c_m"] = r.degeneracy.c_m;
  return j;
}
} // namespace

std::string to_json(const ShapeReport& r) { return report_json(r).dump(1); }

std::string to_json(const std::vector<ShapeReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr.dump(1);
}

} // namespace anivem
