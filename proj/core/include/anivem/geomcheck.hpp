#pragma once

#include "anivem/mesh.hpp"

#include <numbers>

namespace anivem {

struct TriangleAngles {
  std::array<double, 3> at;  // angle at each vertex
  double min = 0, max = 0;
};

/// Interior angles; throws GeometryError when the area is below 1e-14 h^2.
TriangleAngles tri_angles(const Vec3& a, const Vec3& b, const Vec3& c);

/// Boundary triangulation of a cell with local vertex numbering.
struct BoundarySurface {
  std::vector<VertexId> ids;  // local -> global vertex id
  std::vector<Vec3> points;
  std::vector<std::array<int, 3>> tris;
};

BoundarySurface cell_surface(const PolyMesh& mesh, CellId c);

struct PathCheck {
  bool ok = false;
  int largest_triangle = -1;
  /// Per local vertex: vertex ids from that vertex to a vertex of the largest triangle
  /// along admissible edges (empty if unreachable).
  std::vector<std::vector<VertexId>> paths;
  std::vector<VertexId> unreached;
};

/// Path condition: every vertex reaches the largest triangle through edges whose opposite
/// angle in some adjacent triangle is at most (1+eps) times that triangle's smallest angle.
PathCheck check_A2(const BoundarySurface& s, double eps);
PathCheck check_A2(const PolyMesh& mesh, CellId c, double eps);

struct IsotropyCheck {
  bool ok = false;
  double eps = 0;  // admissibility parameter implied when ok
};

/// Every triangle shares an edge with a triangle (possibly itself) whose smallest angle is at
/// least theta_min and whose diameter is at least rho times its own.
IsotropyCheck check_A2prime(const BoundarySurface& s, double theta_min, double rho);
IsotropyCheck check_A2prime(const PolyMesh& mesh, CellId c, double theta_min, double rho);
double a2prime_epsilon(double theta_max, double theta_min, double rho);

double kappa(double theta_max, double eps);
/// Bound on the boundary Poincare constant; throws if the path condition fails.
double poincare_bound(const PolyMesh& mesh, CellId c, double eps);

/// Radius of a ball inside the cell divided by the cell diameter (a lower bound on the best).
double inscribed_ratio(const PolyMesh& mesh, CellId c);

struct Degeneracy {
  double best_det = 0;  // max |det| over triples of distinct unit edge directions
  double c_m = 0;       // guaranteed lower bound from the maximum angle
};

double degeneracy_constant(double theta_max);
double best_edge_determinant(const std::vector<Vec3>& directions);
Degeneracy degeneracy(const PolyMesh& mesh, CellId c);
/// Largest face or dihedral angle of a tetrahedron.
double tet_max_angle(const std::array<Vec3, 4>& t);
/// Dirichlet energy of the linear interpolant of vertex values via the circumradius/cosine form.
double cotangent_energy(const std::array<Vec3, 3>& t, const Vec3& values);
/// Same energy from the surface gradient.
double gradient_energy(const std::array<Vec3, 3>& t, const Vec3& values);

struct StripCheck {
  bool ok = false;
  double max_distance = 0;  // max |phi|/|grad phi| over samples on the discrete interface
  double worst_ratio = 0;   // max of distance / h_K^2
};

/// Distance of the discrete interface from the exact one, sampled at 10 points per triangle.
StripCheck check_A5(const LevelSet& phi, const PolyMesh& mesh, double C);

struct ShapeOptions {
  double eps = 1.0;
  double theta_min = std::numbers::pi / 6;
  double rho = 0.5;
  bool with_paths = true;
};

struct ShapeReport {
  CellId cell = -1;
  double theta_max = 0;
  double theta_min = 0;
  int n_triangles = 0;
  bool a2_ok = false;
  std::vector<std::vector<VertexId>> a2_paths;
  bool a2prime_ok = false;
  double eps = 1.0;
  double eps_a2prime = 0;
  double kappa = 0;
  double poincare_bound = 0;  // NaN if the path condition fails
  double inscribed_ratio = 0;
  Degeneracy degeneracy;
};

ShapeReport shape_report(const PolyMesh& mesh, CellId c, const ShapeOptions& opt = {});
std::string to_json(const ShapeReport& r);
std::string to_json(const std::vector<ShapeReport>& reports);

} // namespace anivem
