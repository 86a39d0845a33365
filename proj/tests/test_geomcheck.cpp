#include "anivem/anivem.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <numbers>

using namespace anivem;
constexpr double pi = std::numbers::pi;

namespace {

// Rebuilds a mesh with every vertex mapped through f.
PolyMesh transform(const PolyMesh& m, const std::function<Vec3(const Vec3&)>& f) {
  auto j = nlohmann::json::parse(to_json(m));
  for (auto& v : j["vertices"]) {
    Vec3 x = f(Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>()));
    v = {x.x(), x.y(), x.z()};
  }
  return mesh_from_json(j.dump());
}

Mat3 random_rotation(std::mt19937_64& rng) {
  Eigen::Quaterniond q(Eigen::Vector4d(oracle::random_point(rng).x(), oracle::random_point(rng).y(),
                                       oracle::random_point(rng).z(), oracle::random_point(rng).x()).normalized());
  return q.toRotationMatrix();
}

double oracle_kappa(double theta_max, double eps) { return std::sqrt(2.0) / std::sin((pi - theta_max) / (2 + eps)); }

double oracle_cm(double theta_max) {
  double s = std::sin(theta_max);
  double b = std::min(std::cos(theta_max / 2), s);
  return std::min(std::sqrt(3.0) / 2, s) * b * b;
}

// Flat surface: a large triangle, a small one on its corner and a needle on the small one.
BoundarySurface needle_surface() {
  BoundarySurface s;
  Vec3 a(0, 0, 0), b(10, 0, 0), c(0, 10, 0), d(1, -0.5, 0);
  Vec3 mid = (a + d) / 2;
  Vec3 out = Vec3(-0.5, -1, 0).normalized();  // away from b
  Vec3 p = mid + 10 * out;
  s.points = {a, b, c, d, p};
  s.ids = {0, 1, 2, 3, 4};
  s.tris = {{0, 1, 2}, {0, 3, 1}, {0, 4, 3}};
  return s;
}

} // namespace

TEST_CASE("tri_angles") {
  auto r = tri_angles(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0));
  CHECK(r.min == doctest::Approx(pi / 4));
  CHECK(r.max == doctest::Approx(pi / 2));
  auto e = tri_angles(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, std::sqrt(3.0) / 2, 0));
  CHECK(e.min == doctest::Approx(pi / 3));
  CHECK(e.max == doctest::Approx(pi / 3));
  CHECK(tri_angles(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, 1e-3, 0)).max > 3.0);
  CHECK_THROWS_AS(tri_angles(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)), GeometryError);

  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    Vec3 a = oracle::random_point(rng), b = oracle::random_point(rng), c = oracle::random_point(rng);
    if (triangle_area(a, b, c) < 1e-3) continue;
    auto t = tri_angles(a, b, c);
    CHECK(t.at[0] == doctest::Approx(oracle::angle_at(a, b, c)));
    CHECK(t.at[1] == doctest::Approx(oracle::angle_at(b, c, a)));
    CHECK(t.at[0] + t.at[1] + t.at[2] == doctest::Approx(pi));
  }
}

TEST_CASE("closed-form constants") {
  CHECK(kappa(pi / 2, 1) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(kappa(pi / 2, 0) == doctest::Approx(2).epsilon(1e-14));
  CHECK(kappa(144 * pi / 180, 1) == doctest::Approx(6.8023).epsilon(1e-4));
  CHECK_THROWS_AS(kappa(pi, 1), GeometryError);
  CHECK(a2prime_epsilon(pi / 2, pi / 6, 1) == doctest::Approx(3).epsilon(1e-14));
  CHECK(degeneracy_constant(pi / 2) == doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-14));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, pi - 0.05), ue(0, 5);
  for (int k = 0; k < 100; ++k) {
    double t = u(rng), e = ue(rng);
    CHECK(kappa(t, e) == doctest::Approx(oracle_kappa(t, e)).epsilon(1e-14));
    CHECK(kappa(t, e) >= std::sqrt(2.0));
    CHECK(degeneracy_constant(t) == doctest::Approx(oracle_cm(t)).epsilon(1e-14));
  }
}

TEST_CASE("path condition on the unit cube") {
  PolyMesh m = cube_mesh(1);
  auto r = check_A2(m, 0, 1.0);
  CHECK(r.ok);
  CHECK(r.unreached.empty());
  // right isoceles triangles: the legs face the smallest angle, so they are admissible even at eps = 0
  for (double eps : {0.0, 0.5, 1.0}) CHECK(check_A2(m, 0, eps).ok);
  auto s = cell_surface(m, 0);
  CHECK(s.tris.size() == 12);
  CHECK(poincare_bound(m, 0, 1) == doctest::Approx(std::sqrt(5.0) * 2 * std::sqrt(2.0) * std::sqrt(3.0) * std::sqrt(12.0)));
  CHECK(poincare_bound(m, 0, 1) == doctest::Approx(37.95).epsilon(1e-3));
}

TEST_CASE("path condition routes around inadmissible edges") {
  auto s = needle_surface();
  auto r = check_A2(s, 1.0);
  CHECK_FALSE(r.ok);
  CHECK(r.largest_triangle == 0);
  REQUIRE(r.unreached.size() == 1);
  CHECK(r.unreached[0] == 4);
  CHECK(r.paths[4].empty());

  auto ok = check_A2(s, 20.0);
  CHECK(ok.ok);
  // paths walk along triangle edges and end on the largest triangle
  for (int v = 0; v < 5; ++v) {
    const auto& p = ok.paths[v];
    REQUIRE_FALSE(p.empty());
    CHECK(p.front() == v);
    CHECK(p.back() <= 2);
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
      bool edge = false;
      for (auto t : s.tris)
        for (int i = 0; i < 3; ++i)
          edge = edge || (t[i] == p[k] && t[(i + 1) % 3] == p[k + 1]) || (t[i] == p[k + 1] && t[(i + 1) % 3] == p[k]);
      CHECK(edge);
    }
  }
  // single triangle is vacuously fine
  BoundarySurface one;
  one.points = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  one.ids = {0, 1, 2};
  one.tris = {{0, 1, 2}};
  CHECK(check_A2(one, 0.0).ok);
}

TEST_CASE("path condition is monotone in eps") {
  PolyMesh m = cut_by_levelset(tet_mesh(4), sphere_levelset(Vec3(0.5, 0.5, 0.5), 0.5 + 1.0 / 28));
  for (CellId c = 0; c < static_cast<CellId>(m.num_cells()); c += 7) {
    auto s = cell_surface(m, c);
    bool prev = false;
    for (double eps : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
      bool ok = check_A2(s, eps).ok;
      CHECK((!prev || ok));
      prev = ok;
    }
  }
}

TEST_CASE("isotropy condition: slab versus needle prism") {
  PolyMesh slab = cut_by_plane(cube_mesh(1), Plane::from_coefficients(Vec3(0, 0, 1), 1e-3));
  PolyMesh prism = cut_by_plane(cube_mesh(1), Plane::from_coefficients(Vec3(1, 1, 0), 2 - 1e-3));
  REQUIRE(slab.num_cells() == 2);
  REQUIRE(prism.num_cells() == 2);
  auto thin = [](const PolyMesh& m) { return m.cell_volume(0) < m.cell_volume(1) ? 0 : 1; };
  auto sl = check_A2prime(slab, thin(slab), pi / 6, 0.5);
  CHECK(sl.ok);
  CHECK(sl.eps > 0);
  CHECK_FALSE(check_A2prime(prism, thin(prism), pi / 6, 0.5).ok);
  // the needle prism still satisfies the path condition
  CHECK(check_A2(prism, thin(prism), 1.0).ok);
  // A2' implies A2 with the returned eps
  CHECK(check_A2(slab, thin(slab), sl.eps).ok);
}

TEST_CASE("poincare bound and degeneracy under rigid motion and scaling") {
  std::mt19937_64 rng(21);
  PolyMesh base = notch_element();
  double pb = poincare_bound(base, 0, 2.0);
  auto dg = degeneracy(base, 0);
  for (int k = 0; k < 5; ++k) {
    Mat3 R = random_rotation(rng);
    Vec3 shift = oracle::random_point(rng);
    PolyMesh rig = transform(base, [&](const Vec3& x) { return R * x + shift; });
    CHECK(poincare_bound(rig, 0, 2.0) == doctest::Approx(pb).epsilon(1e-10));
    CHECK(degeneracy(rig, 0).best_det == doctest::Approx(dg.best_det).epsilon(1e-10));
  }
  PolyMesh big = transform(base, [](const Vec3& x) { return 2.0 * x; });
  CHECK(poincare_bound(big, 0, 2.0) == doctest::Approx(2 * pb).epsilon(1e-12));
  CHECK(degeneracy(big, 0).best_det == doctest::Approx(dg.best_det).epsilon(1e-12));
  PolyMesh cube2 = transform(cube_mesh(1), [](const Vec3& x) { return 2.0 * x; });
  CHECK(poincare_bound(cube2, 0, 1) == doctest::Approx(2 * poincare_bound(cube_mesh(1), 0, 1)));
}

TEST_CASE("poincare bound requires the path condition") {
  PolyMesh m = cut_by_levelset(tet_mesh(4), sphere_levelset(Vec3(0.5, 0.5, 0.5), 0.5 + 1.0 / 28));
  int failing = 0;
  for (CellId c = 0; c < static_cast<CellId>(m.num_cells()); ++c) {
    if (check_A2(m, c, 0.0).ok) continue;
    ++failing;
    CHECK_THROWS_AS(poincare_bound(m, c, 0.0), GeometryError);
  }
  CHECK(failing > 0);
}

TEST_CASE("inscribed ratio") {
  double cube = inscribed_ratio(cube_mesh(1), 0);
  CHECK(cube >= 0.28);
  CHECK(cube <= 0.5 / std::sqrt(3.0) + 1e-12);
  CHECK(inscribed_ratio(notch_element(), 0) >= 0.15);
  CHECK(inscribed_ratio(notch_element(0.4, 0.25), 0) >= 0.15);
  for (double t : {1e-1, 1e-2, 1e-3}) {
    PolyMesh slab = cut_by_plane(cube_mesh(1), Plane::from_coefficients(Vec3(0, 0, 1), t));
    CellId thin = slab.cell_volume(0) < slab.cell_volume(1) ? 0 : 1;
    CHECK(inscribed_ratio(slab, thin) <= t / 2 / slab.cell(thin).diameter + 1e-12);
  }
}

TEST_CASE("edge-triple determinant") {
  std::vector<Vec3> axes = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  CHECK(best_edge_determinant(axes) == doctest::Approx(1));
  PolyMesh corner = cut_by_plane(cube_mesh(1), Plane::from_coefficients(Vec3(1, 1, 1), 0.5));
  CellId c = corner.cell_volume(0) < corner.cell_volume(1) ? 0 : 1;
  CHECK(degeneracy(corner, c).best_det == doctest::Approx(1));
  CHECK(degeneracy(cube_mesh(1), 0).best_det == doctest::Approx(1));
  std::vector<Vec3> flat = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0).normalized()};
  CHECK(best_edge_determinant(flat) == doctest::Approx(0).epsilon(1e-15));
}

TEST_CASE("random tetrahedra with bounded angles are not degenerate") {
  std::mt19937_64 rng(77);
  int tested = 0;
  while (tested < 300) {
    std::array<Vec3, 4> t;
    for (auto& p : t) p = oracle::random_point(rng);
    if (std::abs(tet_signed_volume(t[0], t[1], t[2], t[3])) < 1e-4) continue;
    double tm = tet_max_angle(t);
    if (tm > 2 * pi / 3) continue;
    ++tested;
    std::vector<Vec3> dirs;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) dirs.push_back((t[j] - t[i]).normalized());
    double best = 0;
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b)
        for (int c = b + 1; c < 6; ++c) {
          Mat3 M;
          M << dirs[a], dirs[b], dirs[c];
          best = std::max(best, std::abs(M.determinant()));
        }
    CHECK(best_edge_determinant(dirs) == doctest::Approx(best).epsilon(1e-14));
    CHECK(best >= oracle_cm(tm));
  }
}

TEST_CASE("cotangent identity") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 300; ++k) {
    std::array<Vec3, 3> t = {oracle::random_point(rng), oracle::random_point(rng), oracle::random_point(rng)};
    double area = triangle_area(t[0], t[1], t[2]);
    if (area < 1e-3) continue;
    Vec3 g = oracle::random_point(rng);
    Vec3 vals(g.dot(t[0]), g.dot(t[1]), g.dot(t[2]));
    Vec3 n = (t[1] - t[0]).cross(t[2] - t[0]).normalized();
    Vec3 gt = g - g.dot(n) * n;
    double exact = area * gt.squaredNorm();
    CHECK(gradient_energy(t, vals) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(cotangent_energy(t, vals) == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("strip condition for discrete interfaces") {
  Plane p = Plane::from_coefficients(Vec3(1, 2, -0.5), 0.7);
  PolyMesh pm = cut_by_levelset(tet_mesh(4), plane_levelset(p));
  auto flat = check_A5(plane_levelset(p), pm, 1e-9);
  CHECK(flat.ok);
  CHECK(flat.max_distance < 1e-12);

  auto phi = sphere_levelset(Vec3(0.5, 0.5, 0.5), 0.5);
  std::vector<double> dist;
  for (int n : {4, 8, 16}) {
    auto r = check_A5(phi, cut_by_levelset(tet_mesh(n), phi), 2.0);
    if (n >= 8) CHECK(r.ok);
    dist.push_back(r.max_distance);
  }
  for (std::size_t k = 0; k + 1 < dist.size(); ++k) {
    double ratio = dist[k] / dist[k + 1];
    CHECK(ratio >= 3);
    CHECK(ratio <= 5);
  }
  LevelSet flatgrad{[](const Vec3& x) { return x.z() - 0.5; }, [](const Vec3&) { return Vec3::Zero(); }};
  CHECK_THROWS_AS(check_A5(flatgrad, cut_by_levelset(tet_mesh(2), plane_levelset(Plane{Vec3::UnitZ(), 0.5 + 1e-3})), 1.0),
                  GeometryError);
}

TEST_CASE("shape report") {
  PolyMesh m = cube_mesh(1);
  auto r = shape_report(m, 0);
  CHECK(r.theta_max == doctest::Approx(pi / 2));
  CHECK(r.theta_min == doctest::Approx(pi / 4));
  CHECK(r.n_triangles == 12);
  CHECK(r.a2_ok);
  CHECK(r.a2prime_ok);
  CHECK(r.kappa == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(r.degeneracy.best_det <= 1 + 1e-12);
  CHECK(r.degeneracy.c_m == doctest::Approx(std::sqrt(3.0) / 4));
  auto j = nlohmann::json::parse(to_json(r));
  for (const char* key : {"cell", "theta_max", "a2_ok", "kappa", "poincare_bound", "inscribed_ratio"})
    CHECK(j.contains(key));
  auto all = nlohmann::json::parse(to_json(std::vector<ShapeReport>{r, r}));
  CHECK(all.size() == 2);
}
