#pragma once

#include "anivem/mesh.hpp"

namespace anivem {

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
};

/// Plane {x : normal . x = offset} with a unit normal.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0;
  /// Normalizes a plane given as n . x = d with arbitrary |n| > 0.
  static Plane from_coefficients(const Vec3& n, double d);
};

/// n^3 hexahedral cells, two triangles per face, five sub-tets per cell.
PolyMesh cube_mesh(int n, const Box& box = {});
/// Kuhn subdivision: six tetrahedra per cube, conforming across cubes.
PolyMesh tet_mesh(int n, const Box& box = {});

/// Vertices closer to the plane than this fraction of the mesh size are snapped onto it.
inline constexpr double kPlaneSnap = 1e-4;

/// Splits every cell crossed by the plane into its two convex halves (minus half below the
/// plane). Requires convex cells with planar convex faces.
PolyMesh cut_by_plane(const PolyMesh& mesh, const Plane& plane);

/// Marks tetrahedra crossed by the zero set of the piecewise linear interpolant of phi as
/// interface cells, keeping them whole, with sub-tets on each side and the interface plane.
PolyMesh cut_by_levelset(const PolyMesh& tets, const LevelSet& phi);

/// Unit cube with a rectangular slot of the given depth (along x) and width (along y) cut
/// from the face x = 0 through the full height.
PolyMesh notch_element(double depth = 0.25, double width = 0.25);
/// Periodic tiling of the unit cube: each of the n^3 cubes holds a notch cell and a box
/// cell filling its slot. The default slot keeps both cells' inscribed ratio above 0.17.
PolyMesh notch_mesh(int n, double depth = 0.4, double width = 0.4);

LevelSet sphere_levelset(const Vec3& center, double radius);
LevelSet plane_levelset(const Plane& plane);

} // namespace anivem
