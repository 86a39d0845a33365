// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "anivem/anivem.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <set>

using namespace anivem;

namespace {

constexpr double pi = std::numbers::pi;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Outcome& o) {
  std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::vector<int> kLevels = {4, 8, 16, 32};
const Vec3 kCenter(0.5, 0.5, 0.5);
const Plane kCutPlane = Plane::from_coefficients(Vec3(1, 1, 1), 1.5 + 1e-4);

double sphere_radius(int n) { return 0.5 + 1.0 / (7.0 * n); }

PolyMesh study_mesh(const std::string& family, int n) {
  if (family == "cutplane") return cut_by_plane(cube_mesh(n), kCutPlane);
  if (family == "sphere") return cut_by_levelset(tet_mesh(n), sphere_levelset(kCenter, sphere_radius(n)));
  return notch_mesh(n);
}

// Per-mesh checks shared by criteria 4, 5 and 9, accumulated while the convergence runs
// generate their meshes.
struct MeshAudit {
  // criterion 5
  long h2_cells = 0, h2_skipped = 0, h2_violations = 0;
  double h2_worst_ratio = 0;
  // criterion 9
  std::vector<std::string> invalid;
  double worst_volume_defect = 0;
  double worst_a5_ratio = 0;
  bool a5_ok = true;
  // criterion 4
  double notch_min_ratio = 1;
  double seconds = 0;
  std::set<std::string> families;

  void inspect(const std::string& family, int n, const PolyMesh& m) {
    const auto t0 = Clock::now();
    families.insert(family);
    auto rep = validate(m);
    if (!rep.ok()) invalid.push_back(family + " n=" + std::to_string(n) + ": " + rep.violations.front());
    double vol = 0;
    for (CellId c = 0; c < static_cast<CellId>(m.num_cells()); ++c) vol += m.subtet_volume(c);
    worst_volume_defect = std::max(worst_volume_defect, std::abs(vol - 1));

    std::vector<double> ratio(m.num_cells(), 0), theta(m.num_cells(), 0), inscribed(m.num_cells(), 1);
    std::vector<char> skipped(m.num_cells(), 0);
    parallel_for(m.num_cells(), 0, [&](std::size_t i) {
      const CellId c = static_cast<CellId>(i);
      auto s = cell_surface(m, c);
      double th = 0;
      for (const auto& t : s.tris) th = std::max(th, tri_angles(s.points[t[0]], s.points[t[1]], s.points[t[2]]).max);
      theta[i] = th;
      if (family == "notch") inscribed[i] = inscribed_ratio(m, c);
      if (!check_A2(s, 1.0).ok) {
        skipped[i] = 1;
        return;
      }
      const double k = kappa(th, 1.0);
      ratio[i] = h2_rayleigh(m, c) / (5 * k * k * static_cast<double>(s.tris.size()));
    });
    for (std::size_t i = 0; i < m.num_cells(); ++i) {
      if (skipped[i]) {
        ++h2_skipped;
        continue;
      }
      ++h2_cells;
      h2_violations += !(ratio[i] < 1);
      h2_worst_ratio = std::max(h2_worst_ratio, ratio[i]);
      if (family == "notch") notch_min_ratio = std::min(notch_min_ratio, inscribed[i]);
    }
    if (family == "notch")
      for (double r : inscribed) notch_min_ratio = std::min(notch_min_ratio, r);
    if (family == "sphere" && n >= 8) {
      auto a5 = check_A5(sphere_levelset(kCenter, sphere_radius(n)), m, 2.0);
      a5_ok = a5_ok && a5.ok;
      worst_a5_ratio = std::max(worst_a5_ratio, a5.worst_ratio);
    }
    seconds += seconds_since(t0);
  }

  // for criteria run without the convergence studies
  void cover_study_meshes() {
    for (const std::string family : {"cutplane", "sphere", "notch"})
      if (!families.count(family))
        for (int n : kLevels) inspect(family, n, study_mesh(family, n));
  }
};

MeshAudit audit;

struct StudyResult {
  ConvergenceReport report;
  double seconds = 0;
};

StudyResult run_study(const std::string& family, const std::function<StudyLevel(int)>& make, bool inspect) {
  const double audit_before = audit.seconds;
  const auto t0 = Clock::now();
  LevelFactory f = [&](int n) {
    StudyLevel level = make(n);
    if (inspect) audit.inspect(family, n, level.mesh);
    return level;
  };
  StudyResult r;
  r.report = convergence_study(f, kLevels);
  r.seconds = seconds_since(t0) - (audit.seconds - audit_before);
  return r;
}

Outcome rate_outcome(const StudyResult& r, double limit_seconds) {
  const auto& last = r.report.rows.back();
  Outcome o;
  o.pass = last.energy_order >= 0.9 && last.l2_order >= 1.8 && r.seconds < limit_seconds;
  o.detail = fmt("last-pair energy order %.4f (>= 0.9), L2 order %.4f (>= 1.8), errors %.3e / %.3e, %.1f s (< %.0f s)",
                 last.energy_order, last.l2_order, last.energy, last.l2, r.seconds, limit_seconds);
  return o;
}

//--------------------------------------------------------------------------------

Outcome criterion_patch() {
  const auto t0 = Clock::now();
  SolveOptions opt;
  opt.cg_tol = 1e-12;
  double worst = 0;
  std::string where;
  auto track = [&](const std::string& name, const SolveResult& r) {
    double e = std::max(r.errors->energy, r.errors->l2);
    if (e > worst) {
      worst = e;
      where = name;
    }
  };
  for (auto stab : {Stabilization::face, Stabilization::edge}) {
    opt.stabilization = stab;
    track("cube", solve(cube_mesh(4), linear_patch_problem(3.0), opt));
    track("tet", solve(tet_mesh(4), linear_patch_problem(3.0), opt));
    track("notch", solve(notch_mesh(4), linear_patch_problem(3.0), opt));
  }
  opt.stabilization = Stabilization::face;
  const Plane p = Plane::from_coefficients(Vec3(0.2, 0.3, 1), 0.53);
  const PolyMesh ifm = cut_by_levelset(tet_mesh(4), plane_levelset(p));
  for (auto [bm, bp] : {std::pair{10.0, 1.0}, std::pair{1.0, 10.0}, std::pair{1000.0, 1.0}})
    track(fmt("ife %g/%g", bm, bp), solve(ifm, ife_patch_problem(p, bm, bp), opt));
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 5,
          fmt("max energy/L2 error %.2e (<= 1e-9, worst on %s), %.2f s (< 5 s)", worst, where.c_str(), secs)};
}

Outcome criterion_cutplane() {
  auto r = run_study("cutplane", [](int n) { return StudyLevel{study_mesh("cutplane", n), smooth_problem()}; },
                     true);
  return rate_outcome(r, 300);
}

Outcome criterion_sphere() {
  Outcome all;
  double secs = 0;
  std::string detail;
  for (double ratio : {10.0, 0.1}) {
    auto r = run_study("sphere", [ratio](int n) {
      const double r0 = sphere_radius(n);
      return StudyLevel{study_mesh("sphere", n), sphere_problem(kCenter, r0, ratio, 1.0)};
    }, ratio == 10.0);
    const auto& last = r.report.rows.back();
    all.pass = all.pass && last.energy_order >= 0.9 && last.l2_order >= 1.8;
    secs += r.seconds;
    detail += fmt("beta ratio %g: energy order %.4f, L2 order %.4f; ", ratio, last.energy_order, last.l2_order);
  }
  all.pass = all.pass && secs < 600;
  all.detail = detail + fmt("%.1f s (< 600 s)", secs);
  return all;
}

Outcome criterion_notch() {
  auto r = run_study("notch", [](int n) { return StudyLevel{study_mesh("notch", n), smooth_problem()}; }, true);
  Outcome o = rate_outcome(r, 300);
  o.pass = o.pass && audit.notch_min_ratio >= 0.15;
  o.detail += fmt(", min inscribed ratio %.4f (>= 0.15)", audit.notch_min_ratio);
  return o;
}

Outcome criterion_h2() {
  audit.cover_study_meshes();
  return {audit.h2_violations == 0 && audit.h2_cells > 0,
          fmt("%ld cells checked, %ld violations, max h2/(5 kappa^2 N_T) = %.3e (< 1); %ld cells fail A2(eps=1) and are exempt",
              audit.h2_cells, audit.h2_violations, audit.h2_worst_ratio, audit.h2_skipped)};
}

Outcome criterion_constants() {
  const double k = kappa(pi / 2, 1), e = a2prime_epsilon(pi / 2, pi / 6, 1), cm = degeneracy_constant(pi / 2);
  const double dk = std::abs(k - 2 * std::sqrt(2.0)), de = std::abs(e - 3), dc = std::abs(cm - std::sqrt(3.0) / 4);
  std::vector<double> theta;
  for (int n : kLevels) {
    const PolyMesh m = study_mesh("cutplane", n);
    const std::size_t first = theta.size();
    theta.resize(first + m.num_cells(), 0);
    parallel_for(m.num_cells(), 0, [&](std::size_t i) {
      const auto s = cell_surface(m, static_cast<CellId>(i));
      for (const auto& t : s.tris)
        theta[first + i] = std::max(theta[first + i], tri_angles(s.points[t[0]], s.points[t[1]], s.points[t[2]]).max);
    });
  }
  const double deg = *std::max_element(theta.begin(), theta.end()) * 180 / pi;
  return {dk <= 1e-12 && de <= 1e-12 && dc <= 1e-12 && deg <= 144.0,
          fmt("|kappa-2sqrt2| %.1e, |eps-3| %.1e, |c_m-sqrt3/4| %.1e (<= 1e-12); cut-cuboid max angle %.2f deg (<= 144)", dk,
              de, dc, deg)};
}

Outcome criterion_ife() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> logb(-2, 2), logc(-1, 1), u(-1, 1);
  double inv = 0, cont = 0, flux = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Vec3 n = Vec3(g(rng), g(rng), g(rng)).normalized();
    const Vec3 t1 = n.unitOrthogonal(), t2 = n.cross(t1);
    const double bm = std::pow(10.0, logb(rng)), bp = std::pow(10.0, logb(rng));
    const auto J = jump_matrices(t1, t2, n, bm, bp);
    inv = std::max(inv, (J.minus * J.plus - Mat3::Identity()).norm());
    InterfacePlane plane;
    plane.normal = n;
    plane.t1 = t1;
    plane.t2 = t2;
    plane.anchor = Vec3(u(rng), u(rng), u(rng));
    const auto sp = ProjectionSpace::immersed(plane, bm, bp);
    for (int a = 0; a < 3; ++a) {
      const Vec3 gm = sp.grad_minus.col(a), gp = sp.grad_plus.col(a);
      flux = std::max(flux, std::abs(bm * gm.dot(n) - bp * gp.dot(n)) / (std::max(bm, bp) * std::max(gm.norm(), gp.norm())));
      const Vec3 x = plane.anchor + u(rng) * t1 + u(rng) * t2;
      cont = std::max(cont, std::abs(sp.values(x, Side::minus)[a + 1] - sp.values(x, Side::plus)[a + 1]) /
                                std::max({1.0, gm.norm(), gp.norm()}));
    }
  }
  // quasi-interpolation reproduces members of each interface cell's immersed space
  const double r0 = sphere_radius(8);
  const PolyMesh m = cut_by_levelset(tet_mesh(8), sphere_levelset(kCenter, r0));
  double repro = 0, vertex_cont = 0;
  long cells = 0;
  for (CellId c = 0; c < static_cast<CellId>(m.num_cells()); ++c) {
    if (!m.cell(c).iface) continue;
    ++cells;
    // J_K scales the fitted normal slope by beta^-/beta^+, so its roundoff grows with the contrast
    const double bm = std::pow(10.0, logc(rng)), bp = std::pow(10.0, logc(rng));
    const auto sp = projection_space(m, c, bm, bp);
    const Vec4 coef(g(rng), g(rng), g(rng), g(rng));
    const Vec3 gm = sp.gradient(coef, Side::minus);
    const Vec4 got = quasi_interp_JK(m, c, sp, [&](const Vec3& x) { return coef[0] + gm.dot(x - sp.anchor); });
    repro = std::max(repro, (got - coef).norm() / coef.norm());
    for (VertexId v : m.cell(c).iface->polygon)
      vertex_cont = std::max(vertex_cont, std::abs(sp.eval(coef, m.vertex(v), Side::minus) - sp.eval(coef, m.vertex(v), Side::plus)) /
                                              std::max(1.0, coef.norm()));
  }
  return {inv <= 1e-10 && cont <= 1e-12 && flux <= 1e-12 && repro <= 1e-12 && vertex_cont <= 1e-12,
          fmt("10000 frames, beta in [1e-2,1e2]: |M-M+ - I| %.1e (<= 1e-10), continuity %.1e, flux jump %.1e (<= 1e-12); %ld interface cells, beta in [0.1,10]: "
              "quasi-interpolation %.1e, vertex continuity %.1e (<= 1e-12)",
              inv, cont, flux, cells, repro, vertex_cont)};
}

Outcome criterion_cotangent() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1, 1);
  auto point = [&] { return Vec3(u(rng), u(rng), u(rng)); };
  double worst = 0;
  int tris = 0;
  while (tris < 1000) {
    std::array<Vec3, 3> t = {point(), point(), point()};
    if (triangle_area(t[0], t[1], t[2]) < 1e-3) continue;
    ++tris;
    const Vec3 vals = point();
    const double ge = gradient_energy(t, vals);
    worst = std::max(worst, std::abs(cotangent_energy(t, vals) - ge) / std::max(ge, 1e-300));
  }
  // tetrahedra: perturbed regular tetrahedra, rotated and scaled, kept when all angles <= 2pi/3
  const std::array<Vec3, 4> regular = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  int tets = 0, violations = 0;
  double min_margin = 1e300;
  while (tets < 1000) {
    const Mat3 R = Eigen::Quaterniond(Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng)).normalized()).toRotationMatrix();
    const double s = std::exp(3 * u(rng));
    std::array<Vec3, 4> t;
    for (int k = 0; k < 4; ++k) t[k] = s * R * (regular[k] + 0.9 * point());
    if (std::abs(tet_signed_volume(t[0], t[1], t[2], t[3])) < 1e-6 * s * s * s) continue;
    const double tm = tet_max_angle(t);
    if (tm > 2 * pi / 3) continue;
    ++tets;
    std::vector<Vec3> dirs;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) dirs.push_back((t[j] - t[i]).normalized());
    const double margin = best_edge_determinant(dirs) - degeneracy_constant(tm);
    violations += margin < 0;
    min_margin = std::min(min_margin, margin);
  }
  return {worst <= 1e-12 && violations == 0,
          fmt("1000 triangles: max relative residual %.1e (<= 1e-12); 1000 tetrahedra: %d with best_det < c_m, min margin %.3f",
              worst, violations, min_margin)};
}

Outcome criterion_validation() {
  audit.cover_study_meshes();
  // single-cell generators and the patch mesh, on top of every convergence level
  audit.inspect("cube", 4, cube_mesh(4));
  audit.inspect("tet", 4, tet_mesh(4));
  double elem_defect = std::abs(notch_element().subtet_volume(0) - 0.9375);
  if (!validate(notch_element()).ok()) audit.invalid.push_back("notch_element");
  const PolyMesh pm = cut_by_levelset(tet_mesh(4), plane_levelset(Plane::from_coefficients(Vec3(0.2, 0.3, 1), 0.53)));
  audit.inspect("planar-levelset", 4, pm);
  std::string first = audit.invalid.empty() ? "" : " first: " + audit.invalid.front();
  return {audit.invalid.empty() && audit.worst_volume_defect <= 1e-10 && elem_defect <= 1e-12 && audit.a5_ok,
          fmt("%zu invalid meshes%s; max relative volume defect %.1e (<= 1e-10); sphere strip distance / h_K^2 max %.3f "
              "(C = 2, h <= 1/8)",
              audit.invalid.size(), first.c_str(), audit.worst_volume_defect, audit.worst_a5_ratio)};
}

} // namespace

int main(int argc, char** argv) {
  // optional criterion ids to run a subset; 5, 6 and 9 reuse the meshes of 2 to 4
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto want = [&](int id) { return wanted.empty() || wanted.count(id) > 0; };
  using Fn = Outcome (*)();
  const std::vector<std::tuple<int, const char*, Fn>> order = {
      {1, "patch tests", criterion_patch},
      {2, "convergence on cut cuboids", criterion_cutplane},
      {3, "convergence with a sphere interface", criterion_sphere},
      {4, "convergence on notched cells", criterion_notch},
      {7, "immersed space structure", criterion_ife},
      {8, "cotangent identity and degeneracy bound", criterion_cotangent},
  };
  std::map<int, std::pair<const char*, Outcome>> results;
  for (const auto& [id, name, fn] : order) {
    if (!want(id)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    results[id] = {name, o};
  }
  // these read what the convergence runs collected
  auto guarded = [](Fn fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("error: ") + e.what()};
    }
  };
  if (want(5)) results[5] = {"boundary eigenvalue bound", guarded(criterion_h2)};
  if (want(6)) results[6] = {"geometric constants", guarded(criterion_constants)};
  if (want(9)) results[9] = {"validation and conservation", guarded(criterion_validation)};
  for (const auto& [id, r] : results) report(id, r.first, r.second);
  std::printf("%d of %zu criteria passed (mesh audits %.1f s)\n", static_cast<int>(results.size()) - failures,
              results.size(), audit.seconds);
  return failures == 0 ? 0 : 1;
}
