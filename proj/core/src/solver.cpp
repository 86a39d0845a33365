#include "anivem/solver.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace anivem {

namespace {

std::vector<int> cell_dofs(const PolyMesh& mesh, CellId c) {
  std::vector<int> dofs;
  for (VertexId v : mesh.cell_vertices(c)) dofs.push_back(mesh.dof_of_vertex(v));
  return dofs;
}

} // namespace

LinearSystem assemble(const PolyMesh& mesh, const Problem& problem, const SolveOptions& opt) {
  const int threads = resolve_threads(opt.threads);
  const std::size_t nc = mesh.num_cells(), n = mesh.num_dofs();
  LocalParams params{problem.beta_minus, problem.beta_plus, problem.source, opt.stabilization};
  LinearSystem sys;
  sys.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  constexpr std::size_t block = 8192;
  std::vector<LocalOperators> ops;
  std::vector<std::string> failures;
  for (std::size_t start = 0; start < nc; start += block) {
    const std::size_t count = std::min(block, nc - start);
    ops.assign(count, {});
    std::vector<std::string> errs(count);
    parallel_for(count, threads, [&](std::size_t i) {
      try {
        ops[i] = local_operators(mesh, static_cast<CellId>(start + i), params);
      } catch (const std::exception& e) {
        errs[i] = "cell " + std::to_string(start + i) + ": " + e.what();
      }
    });
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t i = 0; i < count; ++i) {
      if (!errs[i].empty()) {
        failures.push_back(errs[i]);
        continue;
      }
      const auto dofs = cell_dofs(mesh, static_cast<CellId>(start + i));
      const auto& K = ops[i].stiffness;
      for (std::size_t a = 0; a < dofs.size(); ++a) {
        sys.rhs[dofs[a]] += ops[i].load[static_cast<Eigen::Index>(a)];
        for (std::size_t b = 0; b < dofs.size(); ++b)
          trips.emplace_back(dofs[a], dofs[b], K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
      }
    }
    SparseMatrix part(sys.matrix.rows(), sys.matrix.cols());
    part.setFromTriplets(trips.begin(), trips.end());
    sys.matrix += part;
  }
  if (!failures.empty()) {
    std::string msg = "assembly failed on " + std::to_string(failures.size()) + " cell(s)";
    for (std::size_t i = 0; i < std::min<std::size_t>(failures.size(), 5); ++i) msg += "\n  " + failures[i];
    throw SolverError(msg);
  }
  sys.matrix.makeCompressed();
  return sys;
}

Eigen::VectorXd DirichletSystem::expand(const Eigen::VectorXd& free_values) const {
  Eigen::VectorXd u = values;
  for (std::size_t i = 0; i < free_dofs.size(); ++i) u[free_dofs[i]] = free_values[static_cast<Eigen::Index>(i)];
  return u;
}

DirichletSystem apply_dirichlet(const LinearSystem& sys, const PolyMesh& mesh,
                                const std::function<double(const Vec3&)>& g) {
  const Eigen::Index n = sys.matrix.rows();
  DirichletSystem out;
  out.values = Eigen::VectorXd::Zero(n);
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  for (int d : mesh.boundary_dofs()) {
    fixed[d] = 1;
    out.values[d] = g(mesh.vertex(mesh.vertex_of_dof(d)));
  }
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  for (int d = 0; d < n; ++d)
    if (!fixed[d]) {
      index[d] = static_cast<int>(out.free_dofs.size());
      out.free_dofs.push_back(d);
    }
  const Eigen::Index nf = static_cast<Eigen::Index>(out.free_dofs.size());
  out.rhs.resize(nf);
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index r = 0; r < nf; ++r) {
    const int i = out.free_dofs[r];
    double b = sys.rhs[i];
    for (SparseMatrix::InnerIterator it(sys.matrix, i); it; ++it) {
      const int j = static_cast<int>(it.col());
      if (fixed[j])
        b -= it.value() * out.values[j];
      else
        trips.emplace_back(static_cast<int>(r), index[j], it.value());
    }
    out.rhs[r] = b;
  }
  out.matrix.resize(nf, nf);
  out.matrix.setFromTriplets(trips.begin(), trips.end());
  return out;
}

CgResult solve_cg(const SparseMatrix& A, const Eigen::VectorXd& b, double tol, int max_iter) {
  const Eigen::Index n = b.size();
  if (max_iter <= 0) max_iter = static_cast<int>(std::max<Eigen::Index>(100, 10 * n));
  CgResult res;
  res.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0) {
    res.history.push_back(0);
    res.objective.push_back(0);
    return res;
  }
  Eigen::VectorXd dinv = A.diagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(dinv[i] > 0)) throw SolverError("matrix has a non-positive diagonal entry at row " + std::to_string(i));
    dinv[i] = 1 / dinv[i];
  }
  Eigen::VectorXd r = b, z = dinv.cwiseProduct(r), p = z, Ap(n);
  double rz = r.dot(z);
  res.residual = 1;
  res.history.push_back(1);
  res.objective.push_back(0);
  while (res.residual > tol) {
    if (res.iterations >= max_iter) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "conjugate gradients did not converge: %d iterations, relative residual %.3e",
                    res.iterations, res.residual);
      throw SolverError(buf);
    }
    Ap.noalias() = A * p;
    const double alpha = rz / p.dot(Ap);
    res.x += alpha * p;
    r -= alpha * Ap;
    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    ++res.iterations;
    res.residual = r.norm() / bnorm;
    res.history.push_back(res.residual);
    res.objective.push_back(res.objective.back() - 0.5 * alpha * rz);
    rz = rz_new;
  }
  return res;
}

ErrorNorms compute_errors(const PolyMesh& mesh, const Problem& problem, const Eigen::VectorXd& u_h, int threads) {
  if (!problem.has_exact()) throw SolverError("problem has no exact solution");
  const std::size_t nc = mesh.num_cells();
  std::vector<double> e1(nc), e0(nc);
  const TetRule& rule = tet_rule(4);
  parallel_for(nc, resolve_threads(threads), [&](std::size_t ci) {
    const CellId c = static_cast<CellId>(ci);
    const ProjectionSpace space = projection_space(mesh, c, problem.beta_minus, problem.beta_plus);
    const Eigen::MatrixXd D = projection_matrix(mesh, c, space);
    const auto dofs = cell_dofs(mesh, c);
    Eigen::VectorXd ul(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i) ul[static_cast<Eigen::Index>(i)] = u_h[dofs[i]];
    const Vec4 coef = D * ul;
    double s1 = 0, s0 = 0;
    for (const SubTet& t : mesh.cell(c).subtets) {
      const auto p = mesh.subtet_points(t);
      const double vol = std::abs(tet_signed_volume(p[0], p[1], p[2], p[3]));
      const Vec3 gh = space.gradient(coef, t.tag);
      const double beta = space.beta(t.tag);
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const auto& b = rule.bary[q];
        const Vec3 x = b[0] * p[0] + b[1] * p[1] + b[2] * p[2] + b[3] * p[3];
        const double w = rule.weights[q] * vol;
        s1 += w * beta * (problem.exact_gradient(x, t.tag) - gh).squaredNorm();
        const double d = problem.exact(x, t.tag) - space.eval(coef, x, t.tag);
        s0 += w * d * d;
      }
    }
    e1[ci] = s1;
    e0[ci] = s0;
  });
  ErrorNorms out;
  for (std::size_t c = 0; c < nc; ++c) {
    out.energy += e1[c];
    out.l2 += e0[c];
  }
  out.energy = std::sqrt(out.energy);
  out.l2 = std::sqrt(out.l2);
  return out;
}

SolveResult solve(const PolyMesh& mesh, const Problem& problem, const SolveOptions& opt) {
  const LinearSystem sys = assemble(mesh, problem, opt);
  const DirichletSystem red = apply_dirichlet(sys, mesh, [&](const Vec3& x) { return problem.dirichlet(x); });
  const CgResult cg = solve_cg(red.matrix, red.rhs, opt.cg_tol, opt.cg_max_iter);
  SolveResult out;
  out.u_h = red.expand(cg.x);
  out.iterations = cg.iterations;
  out.residual = cg.residual;
  out.discrete_energy = std::sqrt(std::max(0.0, out.u_h.dot(sys.matrix * out.u_h)));
  if (problem.has_exact()) out.errors = compute_errors(mesh, problem, out.u_h, opt.threads);
  return out;
}

ConvergenceReport convergence_study(const LevelFactory& make, const std::vector<int>& ns, const SolveOptions& opt) {
  if (ns.size() < 3) throw SolverError("a convergence study needs at least three levels");
  ConvergenceReport rep;
  for (std::size_t l = 0; l < ns.size(); ++l) {
    StudyLevel level = make(ns[l]);
    const auto check = validate(level.mesh);
    if (!check.ok()) throw SolverError("level " + std::to_string(l) + " mesh is invalid: " + check.summary());
    const SolveResult res = solve(level.mesh, level.problem, opt);
    if (!res.errors) throw SolverError("convergence study needs an exact solution");
    ConvergenceRow row;
    row.level = static_cast<int>(l);
    row.n = ns[l];
    row.h = level.mesh.h();
    row.ndof = level.mesh.num_dofs();
    row.energy = res.errors->energy;
    row.l2 = res.errors->l2;
    row.iterations = res.iterations;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.energy_order = row.l2_order = nan;
    if (l > 0) {
      const auto& prev = rep.rows.back();
      const double hr = std::log(prev.h / row.h);
      auto order = [&](double a, double b) { return (a < kExactError && b < kExactError) ? nan : std::log(a / b) / hr; };
      row.energy_order = order(prev.energy, row.energy);
      row.l2_order = order(prev.l2, row.l2);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

std::string ConvergenceReport::to_csv() const {
  std::ostringstream os;
  os << "level,h,ndof,energy_err,energy_order,l2_err,l2_order\n";
  auto order = [&](const ConvergenceRow& r, double o, double err) -> std::string {
    if (r.level == 0) return "";
    if (std::isnan(o)) return err < kExactError ? "exact" : "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", o);
    return buf;
  };
  for (const auto& r : rows) {
    char buf[64];
    os << r.level << ',';
    std::snprintf(buf, sizeof buf, "%.10e", r.h);
    os << buf << ',' << r.ndof << ',';
    std::snprintf(buf, sizeof buf, "%.10e", r.energy);
    os << buf << ',' << order(r, r.energy_order, r.energy) << ',';
    std::snprintf(buf, sizeof buf, "%.10e", r.l2);
    os << buf << ',' << order(r, r.l2_order, r.l2) << '\n';
  }
  return os.str();
}

} // namespace anivem
