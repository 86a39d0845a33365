#pragma once

#include "anivem/common.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace anivem {

using Tri = std::array<VertexId, 3>;

/// Planar polygonal face together with its triangulation. Stored once, shared by its cells.
struct Face {
  std::vector<VertexId> loop;
  std::vector<Tri> tris;  // oriented like the loop
  std::array<CellId, 2> cells{-1, -1};
};

struct CellFace {
  FaceId id = -1;
  bool flip = false;  // true if the face orientation points into the cell
};

struct SubTet {
  std::array<VertexId, 4> v{};
  Side tag = Side::plus;
};

/// Planar interface piece inside a cut cell.
struct InterfacePlane {
  std::vector<VertexId> polygon;
  Vec3 normal = Vec3::UnitZ();  // unit, from minus to plus
  Vec3 t1 = Vec3::UnitX();
  Vec3 t2 = Vec3::UnitY();
  Vec3 anchor = Vec3::Zero();  // point on the plane

  Side side_of(const Vec3& x) const { return (x - anchor).dot(normal) < 0 ? Side::minus : Side::plus; }
};

struct Cell {
  std::vector<CellFace> faces;
  Material tag = Material::plus;
  std::vector<SubTet> subtets;
  std::optional<InterfacePlane> iface;
  double diameter = 0;  // filled by PolyMesh
};

/// Boundary triangle of a cell, outward oriented.
struct OrientedTri {
  Tri v;
  FaceId face;
};

class PolyMesh {
 public:
  PolyMesh() = default;
  /// Takes ownership and computes derived data (diameters, DoF numbering).
  PolyMesh(std::vector<Vec3> vertices, std::vector<Face> faces, std::vector<Cell> cells,
           std::vector<VertexId> boundary_vertices);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Vec3& vertex(VertexId v) const { return vertices_[v]; }
  const Face& face(FaceId f) const { return faces_[f]; }
  const Cell& cell(CellId c) const { return cells_[c]; }
  std::size_t num_cells() const { return cells_.size(); }

  /// Triangulation vertices are the degrees of freedom.
  std::size_t num_dofs() const { return dof_vertex_.size(); }
  int dof_of_vertex(VertexId v) const { return vertex_dof_[v]; }
  VertexId vertex_of_dof(int d) const { return dof_vertex_[d]; }
  const std::vector<VertexId>& boundary_vertices() const { return boundary_vertices_; }
  /// DoF indices on the domain boundary, ascending.
  std::vector<int> boundary_dofs() const;

  double h() const { return h_; }

  /// Boundary triangles of a cell with outward orientation.
  std::vector<OrientedTri> cell_triangles(CellId c) const;
  /// Distinct triangulation vertices on the boundary of a cell, ascending.
  std::vector<VertexId> cell_vertices(CellId c) const;
  /// Polyhedron edges: consecutive loop vertices of its faces, deduplicated, ascending.
  std::vector<std::pair<VertexId, VertexId>> cell_edges(CellId c) const;
  double cell_volume(CellId c) const;  // from the boundary (divergence theorem)
  double subtet_volume(CellId c, std::optional<Side> side = std::nullopt) const;
  /// Vertices of a sub-tet as points.
  std::array<Vec3, 4> subtet_points(const SubTet& t) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Cell> cells_;
  std::vector<VertexId> boundary_vertices_;
  std::vector<int> vertex_dof_;
  std::vector<VertexId> dof_vertex_;
  double h_ = 0;
};

/// Incremental construction. Face orientations within each cell and face-cell links
/// are computed by finish().
class MeshBuilder {
 public:
  VertexId add_vertex(const Vec3& x);
  const Vec3& vertex(VertexId v) const { return vertices_[v]; }
  /// Adds a face with an explicit triangulation.
  FaceId add_face(std::vector<VertexId> loop, std::vector<Tri> tris);
  /// Adds a face triangulated with triangulate_face (optional chord between two loop positions).
  FaceId add_face(std::vector<VertexId> loop, std::optional<std::pair<int, int>> chord = std::nullopt);
  CellId add_cell(std::vector<FaceId> faces, Material tag, std::vector<SubTet> subtets,
                  std::optional<InterfacePlane> iface = std::nullopt);
  std::size_t num_vertices() const { return vertices_.size(); }
  const Face& face(FaceId f) const { return faces_[f]; }
  /// Orients faces, links cells, marks boundary vertices and drops unreferenced faces.
  PolyMesh finish();

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Cell> cells_;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const PolyMesh& mesh);

double tet_signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
/// Newell normal scaled by the polygon area.
Vec3 polygon_area_vector(const std::vector<Vec3>& pts);

//--------------------------------------------------------------------------------
// Face triangulation
//--------------------------------------------------------------------------------

/// Fan triangulation of a planar polygon (at most 8 vertices) from the apex minimizing the
/// largest angle. With a chord (two loop positions) the polygon is split first and each part
/// is fanned. Returns loop positions.
std::vector<std::array<int, 3>> triangulate_face(const std::vector<Vec3>& polygon,
                                                 std::optional<std::pair<int, int>> chord = std::nullopt);

//--------------------------------------------------------------------------------
// I/O
//--------------------------------------------------------------------------------

std::string to_json(const PolyMesh& mesh);
PolyMesh mesh_from_json(const std::string& text);
void save_json(const PolyMesh& mesh, const std::string& path);
PolyMesh load_json(const std::string& path);

struct VtkField {
  std::string name;
  std::vector<double> values;
  bool per_cell = false;  // else one value per DoF
};

/// Legacy ASCII VTK, polyhedral cells written as their sub-tets with a cell-id field.
void export_vtk(const PolyMesh& mesh, const std::vector<VtkField>& fields, const std::string& path);
std::string to_vtk(const PolyMesh& mesh, const std::vector<VtkField>& fields);

} // namespace anivem
