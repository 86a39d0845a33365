#include "json_config.hpp"

#include <anivem/anivem.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace anivem;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

const std::vector<std::string> kMeshKinds = {"cube", "tet", "cutplane", "sphere-interface", "notch", "plane-interface"};
const std::vector<std::string> kProblems = {"smooth", "sphere-interface", "patch-linear", "patch-ife"};

struct UsageError : Error {
  using Error::Error;
};

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const std::string& what) {
  std::vector<double> out;
  std::string token;
  std::istringstream is(text);
  while (std::getline(is, token, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (token.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + token + "' is not a number");
    }
  }
  if (out.size() != count)
    throw UsageError(what + " needs " + std::to_string(count) + " comma-separated numbers, got '" + text + "'");
  return out;
}

// Geometry shared by the mesh kinds and the interface problems.
struct Geometry {
  std::string plane = "1,1,1,1.5";
  std::string center = "0.5,0.5,0.5";
  double r0 = 0.4;
  double depth = 0.4, width = 0.4;

  Plane cut_plane() const {
    const auto v = parse_numbers(plane, 4, "--plane");
    if (Vec3(v[0], v[1], v[2]).norm() == 0) throw UsageError("--plane normal must be nonzero");
    return Plane::from_coefficients(Vec3(v[0], v[1], v[2]), v[3]);
  }
  Vec3 sphere_center() const {
    const auto v = parse_numbers(center, 3, "--center");
    return {v[0], v[1], v[2]};
  }
  void add_options(CLI::App* app) {
    app->add_option("--plane", plane, "Plane as \"nx,ny,nz,d\" for n . x = d")->capture_default_str();
    app->add_option("--center", center, "Sphere center \"x,y,z\"")->capture_default_str();
    app->add_option("--r0", r0, "Sphere radius")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--depth", depth, "Notch slot depth")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    app->add_option("--width", width, "Notch slot width")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  }
};

PolyMesh make_mesh(const std::string& kind, int n, const Geometry& g) {
  if (kind == "cube") return cube_mesh(n);
  if (kind == "tet") return tet_mesh(n);
  if (kind == "cutplane") return cut_by_plane(cube_mesh(n), g.cut_plane());
  if (kind == "sphere-interface") return cut_by_levelset(tet_mesh(n), sphere_levelset(g.sphere_center(), g.r0));
  if (kind == "plane-interface") return cut_by_levelset(tet_mesh(n), plane_levelset(g.cut_plane()));
  if (kind == "notch") return notch_mesh(n, g.depth, g.width);
  throw UsageError("unknown mesh kind '" + kind + "'");
}

bool is_mesh_kind(const std::string& s) { return std::find(kMeshKinds.begin(), kMeshKinds.end(), s) != kMeshKinds.end(); }

struct ProblemSpec {
  std::string name = "smooth";
  double beta_minus = 1, beta_plus = 1;

  Problem build(const Geometry& g) const {
    if (name == "smooth") return smooth_problem();
    if (name == "patch-linear") return linear_patch_problem(beta_plus);
    if (name == "patch-ife") return ife_patch_problem(g.cut_plane(), beta_minus, beta_plus);
    if (name == "sphere-interface") return sphere_problem(g.sphere_center(), g.r0, beta_minus, beta_plus);
    throw UsageError("unknown problem '" + name + "'");
  }
  std::string default_mesh() const {
    if (name == "patch-ife") return "plane-interface";
    if (name == "sphere-interface") return "sphere-interface";
    return "cube";
  }
  void add_options(CLI::App* app) {
    app->add_option("--problem", name, "Problem")->capture_default_str()->check(CLI::IsMember(kProblems));
    app->add_option("--beta-minus", beta_minus, "Coefficient on the minus side")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--beta-plus", beta_plus, "Coefficient on the plus side (and of patch-linear)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }
};

struct SolverFlags {
  std::string stab = "face";
  double tol = 1e-10;
  int max_iter = 0;

  SolveOptions options(int threads) const {
    SolveOptions o;
    o.stabilization = stab == "edge" ? Stabilization::edge : Stabilization::face;
    o.cg_tol = tol;
    o.cg_max_iter = max_iter;
    o.threads = threads;
    return o;
  }
  void add_options(CLI::App* app) {
    app->add_option("--stab", stab, "Stabilization")->capture_default_str()->check(CLI::IsMember({"face", "edge"}));
    app->add_option("--tol", tol, "Relative CG residual tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--max-iter", max_iter, "CG iteration cap (0: ten times the unknowns)")->capture_default_str();
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* material_name(Material m) {
  switch (m) {
    case Material::plus: return "plus";
    case Material::minus: return "minus";
    case Material::interface: return "interface";
  }
  return "?";
}

//--------------------------------------------------------------------------------
// gen

struct GenCmd {
  std::string kind = "cube";
  int n = 4;
  Geometry geo;
  std::string out = "mesh.json";
  std::string vtk;

  int run() const {
    const PolyMesh mesh = make_mesh(kind, n, geo);
    const auto rep = validate(mesh);
    if (!rep.ok()) throw Error("generated mesh is invalid: " + rep.summary());
    save_json(mesh, out);
    if (!vtk.empty()) export_vtk(mesh, {}, vtk);
    std::printf("%s n=%d: %zu cells, %zu vertices, %zu dofs -> %s\n", kind.c_str(), n, mesh.num_cells(),
                mesh.vertices().size(), mesh.num_dofs(), out.c_str());
    return kExitOk;
  }
};

//--------------------------------------------------------------------------------
// check

struct CheckCmd {
  std::string mesh_path;
  ShapeOptions shape;
  double theta_min_deg = 30;
  std::string report;
  bool quiet = false;
  std::string strip_sphere;
  double strip_constant = 2.0;
  int threads = 0;

  int run() {
    const PolyMesh mesh = load_json(mesh_path);
    const auto rep = validate(mesh);
    if (!rep.ok()) throw Error("mesh '" + mesh_path + "' is invalid: " + rep.summary());
    shape.theta_min = theta_min_deg * std::numbers::pi / 180;
    shape.with_paths = !report.empty();
    const std::size_t nc = mesh.num_cells();
    std::vector<ShapeReport> reports(nc);
    std::vector<std::string> errors(nc);
    parallel_for(nc, resolve_threads(threads), [&](std::size_t c) {
      try {
        reports[c] = shape_report(mesh, static_cast<CellId>(c), shape);
      } catch (const std::exception& e) {
        errors[c] = "cell " + std::to_string(c) + ": " + e.what();
      }
    });
    for (const auto& e : errors)
      if (!e.empty()) throw GeometryError(e);

    const double deg = 180 / std::numbers::pi;
    if (!quiet) {
      std::printf("%6s %9s %8s %8s %5s %3s %4s %9s %10s %9s %8s\n", "cell", "material", "maxang", "minang", "tris",
                  "A2", "A2'", "kappa", "poincare", "inscribed", "edgedet");
      for (std::size_t c = 0; c < nc; ++c) {
        const auto& r = reports[c];
        std::printf("%6zu %9s %8.3f %8.3f %5d %3s %4s %9.3e %10.3e %9.4f %8.4f\n", c, material_name(mesh.cell(c).tag),
                    r.theta_max * deg, r.theta_min * deg, r.n_triangles, r.a2_ok ? "ok" : "NO",
                    r.a2prime_ok ? "ok" : "no", r.kappa, r.poincare_bound, r.inscribed_ratio, r.degeneracy.best_det);
      }
    }

    std::vector<CellId> failed;
    double worst_max = 0, worst_min = std::numbers::pi, worst_inscribed = 1, worst_det = 1;
    CellId at_max = 0, at_min = 0, at_inscribed = 0;
    for (std::size_t c = 0; c < nc; ++c) {
      const auto& r = reports[c];
      if (!r.a2_ok) failed.push_back(static_cast<CellId>(c));
      if (r.theta_max > worst_max) worst_max = r.theta_max, at_max = static_cast<CellId>(c);
      if (r.theta_min < worst_min) worst_min = r.theta_min, at_min = static_cast<CellId>(c);
      if (r.inscribed_ratio < worst_inscribed) worst_inscribed = r.inscribed_ratio, at_inscribed = static_cast<CellId>(c);
      worst_det = std::min(worst_det, r.degeneracy.best_det);
    }
    std::printf("%zu cells, eps %g: largest angle %.3f deg (cell %d), smallest angle %.3f deg (cell %d), "
                "smallest inscribed ratio %.4f (cell %d), smallest edge determinant %.4f\n",
                nc, shape.eps, worst_max * deg, at_max, worst_min * deg, at_min, worst_inscribed, at_inscribed,
                worst_det);

    bool strip_ok = true;
    json strip;
    if (!strip_sphere.empty()) {
      const auto v = parse_numbers(strip_sphere, 4, "--strip-sphere");
      const StripCheck s = check_A5(sphere_levelset(Vec3(v[0], v[1], v[2]), v[3]), mesh, strip_constant);
      strip_ok = s.ok;
      strip = {{"ok", s.ok}, {"constant", strip_constant}, {"max_distance", s.max_distance}, {"worst_ratio", s.worst_ratio}};
      std::printf("interface strip: max distance %.3e, max distance / h_K^2 %.4f (limit %g): %s\n", s.max_distance,
                  s.worst_ratio, strip_constant, s.ok ? "ok" : "FAILED");
    }
    if (!failed.empty()) {
      std::string list;
      for (std::size_t i = 0; i < std::min<std::size_t>(failed.size(), 10); ++i)
        list += (i ? ", " : "") + std::to_string(failed[i]);
      if (failed.size() > 10) list += ", ...";
      std::printf("path condition FAILED on %zu cell(s): %s\n", failed.size(), list.c_str());
    }

    if (!report.empty()) {
      json doc;
      doc["mesh"] = mesh_path;
      doc["eps"] = shape.eps;
      doc["theta_min"] = shape.theta_min;
      doc["rho"] = shape.rho;
      doc["failed_cells"] = failed;
      if (!strip.is_null()) doc["interface_strip"] = strip;
      doc["cells"] = json::parse(to_json(reports));
      write_text(report, doc.dump(1) + "\n");
    }
    return failed.empty() && strip_ok ? kExitOk : kExitCheckFailed;
  }
};

//--------------------------------------------------------------------------------
// solve

struct SolveCmd {
  ProblemSpec problem;
  std::string mesh;
  int n = 4;
  Geometry geo;
  SolverFlags solver;
  std::string vtk;
  std::string summary;
  int threads = 0;

  int run() const {
    const std::string source = mesh.empty() ? problem.default_mesh() : mesh;
    PolyMesh m;
    if (is_mesh_kind(source)) {
      m = make_mesh(source, n, geo);
    } else {
      if (!std::filesystem::exists(source))
        throw UsageError("--mesh '" + source + "' is neither a mesh kind nor an existing file");
      m = load_json(source);
      const auto rep = validate(m);
      if (!rep.ok()) throw Error("mesh '" + source + "' is invalid: " + rep.summary());
    }
    const Problem p = problem.build(geo);
    const SolveResult res = solve(m, p, solver.options(threads));

    std::printf("%s on %s: %zu cells, %zu dofs, %d CG iterations, residual %.3e\n", problem.name.c_str(),
                source.c_str(), m.num_cells(), m.num_dofs(), res.iterations, res.residual);
    if (res.errors)
      std::printf("energy error %.6e, L2 error %.6e\n", res.errors->energy, res.errors->l2);

    if (!summary.empty()) {
      json doc;
      doc["problem"] = problem.name;
      doc["mesh"] = source;
      if (is_mesh_kind(source)) doc["n"] = n;
      doc["beta_minus"] = problem.beta_minus;
      doc["beta_plus"] = problem.beta_plus;
      doc["stabilization"] = solver.stab;
      doc["cells"] = m.num_cells();
      doc["dofs"] = m.num_dofs();
      doc["h"] = m.h();
      doc["cg_iterations"] = res.iterations;
      doc["cg_residual"] = res.residual;
      doc["discrete_energy"] = res.discrete_energy;
      doc["energy_error"] = res.errors ? finite_or_null(res.errors->energy) : json(nullptr);
      doc["l2_error"] = res.errors ? finite_or_null(res.errors->l2) : json(nullptr);
      write_text(summary, doc.dump(1) + "\n");
    }
    if (!vtk.empty()) {
      std::vector<double> u(res.u_h.data(), res.u_h.data() + res.u_h.size());
      std::vector<double> material(m.num_cells());
      for (std::size_t c = 0; c < m.num_cells(); ++c) material[c] = static_cast<double>(m.cell(c).tag);
      export_vtk(m, {{"u_h", u, false}, {"material", material, true}}, vtk);
    }
    return kExitOk;
  }
};

//--------------------------------------------------------------------------------
// converge

struct ConvergeCmd {
  ProblemSpec problem;
  std::string mesh;
  int levels = 4;
  int base_n = 4;
  Geometry geo;
  SolverFlags solver;
  std::string out;
  int threads = 0;

  int run() const {
    const std::string kind = mesh.empty() ? problem.default_mesh() : mesh;
    if (!is_mesh_kind(kind)) throw UsageError("converge needs a mesh kind, got '" + kind + "'");
    if (levels < 3) throw UsageError("--levels must be at least 3");
    std::vector<int> ns;
    for (int l = 0, n = base_n; l < levels; ++l, n *= 2) ns.push_back(n);
    const Problem p = problem.build(geo);
    if (!p.has_exact()) throw UsageError("problem '" + problem.name + "' has no exact solution");
    const auto rep =
        convergence_study([&](int n) { return StudyLevel{make_mesh(kind, n, geo), p}; }, ns, solver.options(threads));
    const std::string csv = rep.to_csv();
    if (out.empty())
      std::cout << csv;
    else
      write_text(out, csv);
    return kExitOk;
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lowest-order virtual elements on polyhedral meshes"};
  app.name("anivem");
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<anivem::cli::TomlOrJsonConfig>());
  app.set_config("--config", "", "TOML or JSON file; command line flags override it");
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: ANIVEM_THREADS or all cores)")->check(CLI::NonNegativeNumber);

  GenCmd gen;
  auto* gen_app = app.add_subcommand("gen", "Generate a mesh and write it as JSON");
  gen_app->add_option("--kind", gen.kind, "Mesh kind")->capture_default_str()->check(CLI::IsMember(kMeshKinds));
  gen_app->add_option("--n", gen.n, "Subdivisions per direction")->capture_default_str()->check(CLI::Range(1, 4096));
  gen.geo.add_options(gen_app);
  gen_app->add_option("--out", gen.out, "Mesh JSON path")->capture_default_str();
  gen_app->add_option("--vtk", gen.vtk, "Also write legacy VTK");

  CheckCmd check;
  auto* check_app = app.add_subcommand("check", "Per-cell shape report; exit 2 if the path condition fails");
  check_app->add_option("--mesh", check.mesh_path, "Mesh JSON path")->required()->check(CLI::ExistingFile);
  check_app->add_option("--eps", check.shape.eps, "Path condition angle tolerance")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  check_app->add_option("--theta-min", check.theta_min_deg, "Isotropic triangle angle bound in degrees")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 60.0));
  check_app->add_option("--rho", check.shape.rho, "Isotropic neighbour size ratio")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  check_app->add_option("--report", check.report, "Write the full report as JSON");
  check_app->add_flag("--quiet", check.quiet, "Print only the summary");
  check_app->add_option("--strip-sphere", check.strip_sphere, "Check the interface strip against \"cx,cy,cz,r\"");
  check_app->add_option("--strip-constant", check.strip_constant, "Allowed distance / h_K^2")->capture_default_str();

  SolveCmd solve_cmd;
  auto* solve_app = app.add_subcommand("solve", "Solve a model problem on one mesh");
  solve_cmd.problem.add_options(solve_app);
  solve_app->add_option("--mesh", solve_cmd.mesh, "Mesh kind or mesh JSON path (default depends on the problem)");
  solve_app->add_option("--n", solve_cmd.n, "Subdivisions per direction")->capture_default_str()->check(CLI::Range(1, 4096));
  solve_cmd.geo.add_options(solve_app);
  solve_cmd.solver.add_options(solve_app);
  solve_app->add_option("--vtk", solve_cmd.vtk, "Write the solution as legacy VTK");
  solve_app->add_option("--summary", solve_cmd.summary, "Write a JSON summary");

  ConvergeCmd conv;
  auto* conv_app = app.add_subcommand("converge", "Convergence study on uniformly refined meshes");
  conv.problem.add_options(conv_app);
  conv_app->add_option("--mesh", conv.mesh, "Mesh kind (default depends on the problem)")->check(CLI::IsMember(kMeshKinds));
  conv_app->add_option("--levels", conv.levels, "Number of refinement levels")->capture_default_str();
  conv_app->add_option("--base-n", conv.base_n, "Subdivisions on the coarsest level, doubled per level")
      ->capture_default_str()
      ->check(CLI::Range(1, 1024));
  conv.geo.add_options(conv_app);
  conv.solver.add_options(conv_app);
  conv_app->add_option("--out", conv.out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    check.threads = solve_cmd.threads = conv.threads = threads;
    if (*gen_app) return gen.run();
    if (*check_app) return check.run();
    if (*solve_app) return solve_cmd.run();
    if (*conv_app) return conv.run();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "anivem: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
