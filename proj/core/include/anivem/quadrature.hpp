#pragma once

#include "anivem/mesh.hpp"

namespace anivem {

/// Barycentric quadrature rule on the reference triangle; weights sum to 1.
struct TriRule {
  int degree;
  std::vector<Eigen::Vector3d> bary;
  std::vector<double> weights;
};

/// Barycentric quadrature rule on the reference tetrahedron; weights sum to 1.
struct TetRule {
  int degree;
  std::vector<Eigen::Vector4d> bary;
  std::vector<double> weights;
};

/// Rule exact at least for polynomials of the given degree (1..4).
const TriRule& tri_rule(int degree);
const TetRule& tet_rule(int degree);

using SidedFunction = std::function<double(const Vec3&, Side)>;

double integrate_triangle(const std::array<Vec3, 3>& t, const std::function<double(const Vec3&)>& f, int degree);
double integrate_tet(const std::array<Vec3, 4>& t, const std::function<double(const Vec3&)>& f, int degree);

/// Integral over a cell through its sub-tets; f receives the sub-tet side.
double integrate_cell(const PolyMesh& mesh, CellId c, const SidedFunction& f, int degree);
/// Integral over the cell boundary triangulation; f receives the side of each triangle.
double integrate_boundary(const PolyMesh& mesh, CellId c, const SidedFunction& f, int degree);

/// Side of a boundary triangle of a cell (interface cells use the plane, others the cell tag).
Side triangle_side(const PolyMesh& mesh, CellId c, const Tri& t);

} // namespace anivem
