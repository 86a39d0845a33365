#pragma once

#include "anivem/problems.hpp"
#include "anivem/vem.hpp"

#include <Eigen/Sparse>

namespace anivem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SolveOptions {
  Stabilization stabilization = Stabilization::face;
  double cg_tol = 1e-10;
  int cg_max_iter = 0;  // 0: ten times the number of unknowns
  int threads = 0;      // 0: ANIVEM_THREADS or hardware
};

struct LinearSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

/// Global stiffness and load over all DoFs (no boundary conditions).
LinearSystem assemble(const PolyMesh& mesh, const Problem& problem, const SolveOptions& opt = {});

struct DirichletSystem {
  SparseMatrix matrix;  // free-free block
  Eigen::VectorXd rhs;
  std::vector<int> free_dofs;
  Eigen::VectorXd values;  // all DoFs, boundary entries set
  Eigen::VectorXd expand(const Eigen::VectorXd& free_values) const;
};

/// Symmetric elimination of boundary DoFs with values g at their vertices.
DirichletSystem apply_dirichlet(const LinearSystem& sys, const PolyMesh& mesh,
                                const std::function<double(const Vec3&)>& g);

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0;  // relative residual norm
  std::vector<double> history;
  /// x^T A x / 2 - b^T x at each iterate; differs from the squared A-norm error by a constant.
  std::vector<double> objective;
};

/// Jacobi-preconditioned conjugate gradients; throws SolverError without convergence.
CgResult solve_cg(const SparseMatrix& A, const Eigen::VectorXd& b, double tol = 1e-10, int max_iter = 0);

struct ErrorNorms {
  double energy = 0;  // || sqrt(beta) grad(u - Pi u_h) ||
  double l2 = 0;      // || u - Pi u_h ||
};

ErrorNorms compute_errors(const PolyMesh& mesh, const Problem& problem, const Eigen::VectorXd& u_h,
                          int threads = 0);

struct SolveResult {
  Eigen::VectorXd u_h;  // all DoFs
  int iterations = 0;
  double residual = 0;
  double discrete_energy = 0;  // sqrt(u_h^T A u_h)
  std::optional<ErrorNorms> errors;
};

SolveResult solve(const PolyMesh& mesh, const Problem& problem, const SolveOptions& opt = {});

struct StudyLevel {
  PolyMesh mesh;
  Problem problem;
};
using LevelFactory = std::function<StudyLevel(int n)>;

struct ConvergenceRow {
  int level = 0;
  int n = 0;
  double h = 0;
  std::size_t ndof = 0;
  double energy = 0, energy_order = 0;  // order is NaN on the first row
  double l2 = 0, l2_order = 0;
  int iterations = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  /// Columns level,h,ndof,energy_err,energy_order,l2_err,l2_order.
  std::string to_csv() const;
};

/// Errors below this are at solver precision; their orders are reported as exact.
inline constexpr double kExactError = 1e-11;

/// Needs at least three levels; each mesh must validate.
ConvergenceReport convergence_study(const LevelFactory& make, const std::vector<int>& ns, const SolveOptions& opt = {});

} // namespace anivem
