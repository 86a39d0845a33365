#pragma once

#include "anivem/ife.hpp"
#include "anivem/quadrature.hpp"

namespace anivem {

enum class Stabilization { face, edge };

struct LocalParams {
  double beta_minus = 1, beta_plus = 1;
  SidedFunction source;  // empty means zero load
  Stabilization stabilization = Stabilization::face;
};

/// Per-cell operators on the trace space (one DoF per boundary triangulation vertex).
struct LocalOperators {
  std::vector<VertexId> vertices;  // local DoF -> global vertex id
  ProjectionSpace space;
  Eigen::MatrixXd projection;     // 4 x N coefficients of the projected hat functions
  Eigen::MatrixXd consistency;    // N x N
  Eigen::MatrixXd stabilization;  // N x N, the stabilizing form itself
  Eigen::MatrixXd stiffness;      // consistency + (I-P)^T S (I-P)
  Eigen::VectorXd load;
  double gram_condition = 1;      // condition number of the gradient Gram matrix
};

/// Linear space for ordinary cells, immersed space for cells with interface data.
ProjectionSpace projection_space(const PolyMesh& mesh, CellId c, double beta_minus, double beta_plus);

/// 4 x N coefficients of the energy projection of each hat function; the constant is fixed by
/// matching boundary means. Throws GeometryError on a singular Gram matrix.
Eigen::MatrixXd projection_matrix(const PolyMesh& mesh, CellId c, const ProjectionSpace& space,
                                  double* condition = nullptr);
/// Gradient Gram matrix sum over sides of beta |K^s| g_a . g_b.
Mat3 gradient_gram(const PolyMesh& mesh, CellId c, const ProjectionSpace& space);

/// h_K times the sum over boundary triangles of the surface-gradient products.
Eigen::MatrixXd face_stabilization(const PolyMesh& mesh, CellId c);
/// h_K^2 times the sum over polyhedron edges of the tangential-derivative products.
Eigen::MatrixXd edge_stabilization(const PolyMesh& mesh, CellId c);
/// Mass matrix of the trace space on the cell boundary.
Eigen::MatrixXd boundary_mass(const PolyMesh& mesh, CellId c);

LocalOperators local_operators(const PolyMesh& mesh, CellId c, const LocalParams& params);

/// Trace DoF values of u on the cell boundary (ordered like cell_vertices).
Eigen::VectorXd interpolate_boundary(const PolyMesh& mesh, CellId c, const std::function<double(const Vec3&)>& u);

/// Quasi-interpolant of an interface cell: L2 projection of the minus-side extension onto
/// linear functions over the cell and its face neighbours, then transported to the plus
/// side. Returns coefficients in the cell's immersed projection space.
Vec4 quasi_interp_JK(const PolyMesh& mesh, CellId c, const ProjectionSpace& space,
                     const std::function<double(const Vec3&)>& u_minus);

/// Largest eigenvalue of M v = lambda h_K S v over zero-mean traces (power iteration).
double h2_rayleigh(const PolyMesh& mesh, CellId c, int iterations = 200);
/// Smallest eigenvalue of the edge form against the face form over zero-mean traces.
double stabilization_equivalence(const PolyMesh& mesh, CellId c);

} // namespace anivem
