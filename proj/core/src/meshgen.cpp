#include "anivem/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace anivem {

Plane Plane::from_coefficients(const Vec3& n, double d) {
  const double len = n.norm();
  if (!(len > 0)) throw GeometryError("plane normal must be nonzero");
  return {n / len, d / len};
}

LevelSet sphere_levelset(const Vec3& center, double radius) {
  return {[=](const Vec3& x) { return (x - center).norm() - radius; },
          [=](const Vec3& x) {
            const Vec3 d = x - center;
            const double r = d.norm();
            return r > 0 ? Vec3(d / r) : Vec3(Vec3::Zero());
          }};
}

LevelSet plane_levelset(const Plane& p) {
  return {[=](const Vec3& x) { return p.normal.dot(x) - p.offset; }, [=](const Vec3&) { return p.normal; }};
}

namespace {

// Shares faces between cells by their vertex set.
class FaceRegistry {
 public:
  explicit FaceRegistry(MeshBuilder& b) : b_(b) {}
  FaceId get(const std::vector<VertexId>& loop, const std::vector<Tri>& tris = {}) {
    std::vector<VertexId> key = loop;
    std::sort(key.begin(), key.end());
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    FaceId f = tris.empty() ? b_.add_face(loop) : b_.add_face(loop, tris);
    ids_.emplace(std::move(key), f);
    return f;
  }

 private:
  MeshBuilder& b_;
  std::map<std::vector<VertexId>, FaceId> ids_;
};

// Five tetrahedra filling a hexahedron with corners indexed by bits (x:1, y:2, z:4).
std::vector<SubTet> five_tets(const std::array<VertexId, 8>& c, Side s) {
  return {{{c[0], c[1], c[2], c[4]}, s},
          {{c[3], c[1], c[2], c[7]}, s},
          {{c[5], c[1], c[4], c[7]}, s},
          {{c[6], c[2], c[4], c[7]}, s},
          {{c[1], c[2], c[4], c[7]}, s}};
}

// Quad faces of a hexahedron as vertex loops.
std::array<std::array<int, 4>, 6> hex_faces() {
  return {{{0, 2, 6, 4}, {1, 3, 7, 5}, {0, 1, 5, 4}, {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 5, 7, 6}}};
}

Vec3 lattice(const Box& box, int n, int i, int j, int k) {
  const Vec3 t(double(i) / n, double(j) / n, double(k) / n);
  return box.lo + (box.hi - box.lo).cwiseProduct(t);
}

Vec3 centroid(const std::vector<Vec3>& pts) {
  Vec3 g = Vec3::Zero();
  for (const auto& p : pts) g += p;
  return g / double(pts.size());
}

// Cone the triangles of the given faces to a new interior vertex.
std::vector<SubTet> cone_from_centroid(MeshBuilder& b, const std::vector<FaceId>& faces, Side s) {
  std::set<VertexId> vs;
  for (FaceId f : faces)
    for (VertexId v : b.face(f).loop) vs.insert(v);
  std::vector<Vec3> pts;
  for (VertexId v : vs) pts.push_back(b.vertex(v));
  const VertexId apex = b.add_vertex(centroid(pts));
  std::vector<SubTet> out;
  for (FaceId f : faces)
    for (const Tri& t : b.face(f).tris) out.push_back({{apex, t[0], t[1], t[2]}, s});
  return out;
}

} // namespace

//--------------------------------------------------------------------------------
// Structured meshes
//--------------------------------------------------------------------------------

PolyMesh cube_mesh(int n, const Box& box) {
  if (n < 1) throw GeometryError("cube_mesh needs n >= 1");
  MeshBuilder b;
  auto vid = [&](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) b.add_vertex(lattice(box, n, i, j, k));
  FaceRegistry reg(b);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        std::array<VertexId, 8> c;
        for (int bit = 0; bit < 8; ++bit) c[bit] = vid(i + (bit & 1), j + ((bit >> 1) & 1), k + ((bit >> 2) & 1));
        std::vector<FaceId> faces;
        for (const auto& q : hex_faces()) {
          std::vector<VertexId> loop{c[q[0]], c[q[1]], c[q[2]], c[q[3]]};
          faces.push_back(reg.get(loop, {{loop[0], loop[1], loop[2]}, {loop[0], loop[2], loop[3]}}));
        }
        b.add_cell(faces, Material::plus, five_tets(c, Side::plus));
      }
  return b.finish();
}

PolyMesh tet_mesh(int n, const Box& box) {
  if (n < 1) throw GeometryError("tet_mesh needs n >= 1");
  MeshBuilder b;
  auto vid = [&](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) b.add_vertex(lattice(box, n, i, j, k));
  FaceRegistry reg(b);
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> ijk{i, j, k};
          std::array<VertexId, 4> v;
          v[0] = vid(ijk[0], ijk[1], ijk[2]);
          for (int s = 0; s < 3; ++s) {
            ijk[p[s]] += 1;
            v[s + 1] = vid(ijk[0], ijk[1], ijk[2]);
          }
          std::vector<FaceId> faces;
          for (int skip = 0; skip < 4; ++skip) {
            std::vector<VertexId> loop;
            for (int m = 0; m < 4; ++m)
              if (m != skip) loop.push_back(v[m]);
            faces.push_back(reg.get(loop, {{loop[0], loop[1], loop[2]}}));
          }
          b.add_cell(faces, Material::plus, {{v, Side::plus}});
        }
  return b.finish();
}

//--------------------------------------------------------------------------------
// Plane cut
//--------------------------------------------------------------------------------

PolyMesh cut_by_plane(const PolyMesh& mesh, const Plane& plane) {
  const auto& X = mesh.vertices();
  const double snap = kPlaneSnap * mesh.h();
  std::vector<double> d(X.size());
  std::vector<int> s(X.size());
  for (std::size_t v = 0; v < X.size(); ++v) {
    d[v] = plane.normal.dot(X[v]) - plane.offset;
    if (std::abs(d[v]) < snap) d[v] = 0;
    s[v] = (d[v] > 0) - (d[v] < 0);
  }
  MeshBuilder b;
  for (const auto& x : X) b.add_vertex(x);
  std::map<std::pair<VertexId, VertexId>, VertexId> cuts;
  auto cut_point = [&](VertexId a, VertexId c) {
    const auto key = std::minmax(a, c);
    auto it = cuts.find(key);
    if (it != cuts.end()) return it->second;
    const auto [p, q] = key;
    const double t = d[p] / (d[p] - d[q]);
    const VertexId v = b.add_vertex(X[p] + t * (X[q] - X[p]));
    cuts.emplace(key, v);
    return v;
  };

  struct Mapped {
    FaceId minus = -1, plus = -1;  // pieces (equal if unsplit)
    int side = 0;                   // -1, +1, or 0 for split faces
    bool split = false;
  };
  std::vector<Mapped> fmap(mesh.faces().size());
  for (FaceId f = 0; f < static_cast<FaceId>(mesh.faces().size()); ++f) {
    const Face& face = mesh.face(f);
    bool has_m = false, has_p = false;
    for (VertexId v : face.loop) {
      has_m = has_m || s[v] < 0;
      has_p = has_p || s[v] > 0;
    }
    Mapped& m = fmap[f];
    if (!(has_m && has_p)) {
      m.minus = m.plus = b.add_face(face.loop, face.tris);
      m.side = has_m ? -1 : (has_p ? 1 : 0);
      continue;
    }
    m.split = true;
    std::vector<VertexId> loop;
    std::vector<int> zeros;
    const std::size_t nl = face.loop.size();
    for (std::size_t i = 0; i < nl; ++i) {
      const VertexId a = face.loop[i], c = face.loop[(i + 1) % nl];
      if (s[a] == 0) zeros.push_back(static_cast<int>(loop.size()));
      loop.push_back(a);
      if (s[a] * s[c] < 0) {
        zeros.push_back(static_cast<int>(loop.size()));
        loop.push_back(cut_point(a, c));
      }
    }
    if (zeros.size() != 2) throw GeometryError("face " + std::to_string(f) + " is not convex along the cut");
    std::vector<Vec3> pts;
    for (VertexId v : loop) pts.push_back(b.vertex(v));
    const auto tris = triangulate_face(pts, std::make_pair(zeros[0], zeros[1]));
    const int n = static_cast<int>(loop.size());
    for (int part = 0; part < 2; ++part) {
      const int from = zeros[part], to = zeros[1 - part];
      std::vector<int> pos;
      for (int i = from;; i = (i + 1) % n) {
        pos.push_back(i);
        if (i == to) break;
      }
      std::vector<VertexId> piece;
      int sign = 0;
      for (int i : pos) {
        piece.push_back(loop[i]);
        if (sign == 0 && loop[i] < static_cast<VertexId>(X.size())) sign = s[loop[i]];
      }
      std::vector<Tri> ptris;
      for (const auto& t : tris)
        if (std::all_of(t.begin(), t.end(), [&](int k) { return std::find(pos.begin(), pos.end(), k) != pos.end(); }))
          ptris.push_back({loop[t[0]], loop[t[1]], loop[t[2]]});
      (sign < 0 ? m.minus : m.plus) = b.add_face(piece, ptris);
    }
  }

  for (CellId c = 0; c < static_cast<CellId>(mesh.num_cells()); ++c) {
    const Cell& cell = mesh.cell(c);
    bool has_m = false, has_p = false;
    for (VertexId v : mesh.cell_vertices(c)) {
      has_m = has_m || s[v] < 0;
      has_p = has_p || s[v] > 0;
    }
    if (!(has_m && has_p)) {
      std::vector<FaceId> faces;
      for (const CellFace& cf : cell.faces) faces.push_back(fmap[cf.id].plus);
      const Side side = has_m ? Side::minus : Side::plus;
      auto subtets = cell.subtets;
      for (auto& t : subtets) t.tag = side;
      b.add_cell(faces, has_m ? Material::minus : Material::plus, subtets);
      continue;
    }
    std::vector<FaceId> minus_faces, plus_faces;
    std::set<VertexId> zero_set;
    for (const CellFace& cf : cell.faces) {
      const Mapped& m = fmap[cf.id];
      if (m.split) {
        minus_faces.push_back(m.minus);
        plus_faces.push_back(m.plus);
      } else if (m.side < 0) {
        minus_faces.push_back(m.minus);
      } else if (m.side > 0) {
        plus_faces.push_back(m.plus);
      } else {
        throw GeometryError("cell " + std::to_string(c) + " is not convex");
      }
      const auto& loop = mesh.face(cf.id).loop;
      for (std::size_t i = 0; i < loop.size(); ++i) {
        const VertexId a = loop[i], e = loop[(i + 1) % loop.size()];
        if (s[a] == 0) zero_set.insert(a);
        if (s[a] * s[e] < 0) zero_set.insert(cut_point(a, e));
      }
    }
    if (zero_set.size() < 3) throw GeometryError("cell " + std::to_string(c) + " has a degenerate cut");
    std::vector<VertexId> ring(zero_set.begin(), zero_set.end());
    std::vector<Vec3> rp;
    for (VertexId v : ring) rp.push_back(b.vertex(v));
    const Vec3 g = centroid(rp);
    const Vec3 t1 = (std::abs(plane.normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(plane.normal).normalized();
    const Vec3 t2 = plane.normal.cross(t1);
    std::vector<std::pair<double, VertexId>> byangle;
    for (VertexId v : ring) {
      const Vec3 r = b.vertex(v) - g;
      byangle.push_back({std::atan2(r.dot(t2), r.dot(t1)), v});
    }
    std::sort(byangle.begin(), byangle.end());
    ring.clear();
    for (const auto& [a, v] : byangle) ring.push_back(v);
    const FaceId cut_face = b.add_face(ring);
    minus_faces.push_back(cut_face);
    plus_faces.push_back(cut_face);
    b.add_cell(minus_faces, Material::minus, cone_from_centroid(b, minus_faces, Side::minus));
    b.add_cell(plus_faces, Material::plus, cone_from_centroid(b, plus_faces, Side::plus));
  }
  return b.finish();
}

//--------------------------------------------------------------------------------
// Level-set cut
//--------------------------------------------------------------------------------

PolyMesh cut_by_levelset(const PolyMesh& tets, const LevelSet& phi) {
  // edge fraction below which a cut point is moved onto the nearer edge end
  constexpr double kCutSnap = 1e-10;
  const auto& X = tets.vertices();
  const double h = tets.h();
  std::vector<double> val(X.size(), 0.0);
  for (std::size_t v = 0; v < X.size(); ++v) {
    val[v] = phi.value(X[v]);
    if (val[v] == 0) val[v] = 1e-12 * h;
  }
  auto neg = [&](VertexId v) { return val[v] < 0; };
  MeshBuilder b;
  for (const auto& x : X) b.add_vertex(x);
  std::map<std::pair<VertexId, VertexId>, VertexId> cuts;
  auto cut_point = [&](VertexId a, VertexId c) {
    const auto key = std::minmax(a, c);
    auto it = cuts.find(key);
    if (it != cuts.end()) return it->second;
    const auto [p, q] = key;
    const double t = val[p] / (val[p] - val[q]);
    // a cut this close to an end would only create slivers
    const VertexId v = t < kCutSnap ? p : t > 1 - kCutSnap ? q : b.add_vertex(X[p] + t * (X[q] - X[p]));
    cuts.emplace(key, v);
    return v;
  };

  std::vector<FaceId> fmap(tets.faces().size());
  for (FaceId f = 0; f < static_cast<FaceId>(tets.faces().size()); ++f) {
    const Face& face = tets.face(f);
    if (face.loop.size() != 3) throw GeometryError("cut_by_levelset expects a tetrahedral mesh");
    std::vector<VertexId> loop;
    std::vector<int> chord;
    for (int i = 0; i < 3; ++i) {
      const VertexId a = face.loop[i], c = face.loop[(i + 1) % 3];
      loop.push_back(a);
      if (neg(a) == neg(c)) continue;
      const VertexId v = cut_point(a, c);
      if (v == a)
        chord.push_back(static_cast<int>(loop.size()) - 1);
      else if (v == c)
        chord.push_back(i == 2 ? 0 : static_cast<int>(loop.size()));
      else {
        chord.push_back(static_cast<int>(loop.size()));
        loop.push_back(v);
      }
    }
    // a trace through a face corner leaves the face whole when it runs along an edge
    fmap[f] = loop.size() == 3 ? b.add_face(face.loop, face.tris) : b.add_face(loop, std::make_pair(chord[0], chord[1]));
  }

  for (CellId c = 0; c < static_cast<CellId>(tets.num_cells()); ++c) {
    const Cell& cell = tets.cell(c);
    std::vector<FaceId> faces;
    for (const CellFace& cf : cell.faces) faces.push_back(fmap[cf.id]);
    const auto vs = tets.cell_vertices(c);
    if (vs.size() != 4) throw GeometryError("cut_by_levelset expects a tetrahedral mesh");
    std::vector<VertexId> M, P;
    for (VertexId v : vs) (neg(v) ? M : P).push_back(v);
    const std::array<VertexId, 4> tet{vs[0], vs[1], vs[2], vs[3]};
    if (M.empty() || P.empty()) {
      const Side side = M.empty() ? Side::plus : Side::minus;
      b.add_cell(faces, M.empty() ? Material::plus : Material::minus, {{tet, side}});
      continue;
    }
    std::vector<SubTet> sub;
    std::vector<VertexId> poly;
    auto add = [&](VertexId a, VertexId e, VertexId f, VertexId g, Side sd) { sub.push_back({{a, e, f, g}, sd}); };
    if (M.size() == 2) {
      const VertexId a = M[0], bb = M[1], cc = P[0], dd = P[1];
      const VertexId ac = cut_point(a, cc), ad = cut_point(a, dd), bc = cut_point(bb, cc), bd = cut_point(bb, dd);
      poly = {ac, bc, bd, ad};
      add(a, ac, bc, bd, Side::minus);
      add(a, ac, bd, ad, Side::minus);
      add(a, bb, bc, bd, Side::minus);
      add(cc, ac, bc, bd, Side::plus);
      add(cc, ac, bd, ad, Side::plus);
      add(cc, dd, ad, bd, Side::plus);
    } else {
      const bool lone_minus = M.size() == 1;
      const VertexId v = lone_minus ? M[0] : P[0];
      const auto& others = lone_minus ? P : M;
      const Side lone = lone_minus ? Side::minus : Side::plus, rest = lone_minus ? Side::plus : Side::minus;
      const VertexId a = others[0], bb = others[1], cc = others[2];
      const VertexId pa = cut_point(v, a), pb = cut_point(v, bb), pc = cut_point(v, cc);
      poly = {pa, pb, pc};
      add(v, pa, pb, pc, lone);
      add(a, pa, pb, pc, rest);
      add(a, bb, cc, pc, rest);
      add(a, bb, pc, pb, rest);
    }
    // snapped cuts leave flat sub-tets and repeated polygon corners
    const double cell_vol = std::abs(tet_signed_volume(X[tet[0]], X[tet[1]], X[tet[2]], X[tet[3]]));
    std::erase_if(sub, [&](const SubTet& t) {
      return std::abs(tet_signed_volume(b.vertex(t.v[0]), b.vertex(t.v[1]), b.vertex(t.v[2]), b.vertex(t.v[3]))) <
             1e-12 * cell_vol;
    });
    std::vector<VertexId> distinct;
    for (VertexId v : poly)
      if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
    poly = distinct;
    const bool has_minus = std::any_of(sub.begin(), sub.end(), [](const SubTet& t) { return t.tag == Side::minus; });
    const bool has_plus = std::any_of(sub.begin(), sub.end(), [](const SubTet& t) { return t.tag == Side::plus; });
    if (!has_minus || !has_plus) {
      b.add_cell(faces, has_minus ? Material::minus : Material::plus, {{tet, has_minus ? Side::minus : Side::plus}});
      continue;
    }
    if (poly.size() < 3) throw GeometryError("degenerate interface in cell " + std::to_string(c));
    // interface plane from the linear interpolant
    Mat3 J;
    Vec3 dv;
    for (int k = 0; k < 3; ++k) {
      J.row(k) = (X[tet[k + 1]] - X[tet[0]]).transpose();
      dv[k] = val[tet[k + 1]] - val[tet[0]];
    }
    const Vec3 grad = J.fullPivLu().solve(dv);
    double scale = 0;
    for (VertexId v : tet) scale = std::max(scale, std::abs(val[v]));
    if (!(grad.norm() > 1e-14 * scale / cell.diameter))
      throw GeometryError("degenerate interface in cell " + std::to_string(c));
    InterfacePlane ip;
    ip.polygon = poly;
    ip.normal = grad.normalized();
    std::vector<Vec3> pp;
    for (VertexId v : poly) pp.push_back(b.vertex(v));
    ip.anchor = centroid(pp);
    Vec3 t1 = Vec3::UnitX() - ip.normal.x() * ip.normal;
    if (t1.norm() < 1e-6) t1 = Vec3::UnitY() - ip.normal.y() * ip.normal;
    ip.t1 = t1.normalized();
    ip.t2 = ip.normal.cross(ip.t1);
    b.add_cell(faces, Material::interface, sub, ip);
  }
  return b.finish();
}

//--------------------------------------------------------------------------------
// Notched cubes
//--------------------------------------------------------------------------------

namespace {

PolyMesh build_notch(int n, double depth, double width, bool with_filler) {
  if (!(depth > 0 && depth < 1 && width > 0 && width < 1)) throw GeometryError("notch depth and width must lie in (0,1)");
  const double ya = 0.5 - width / 2, yb = 0.5 + width / 2;
  MeshBuilder b;
  std::map<std::tuple<int, int, int>, VertexId> ids;
  // x index 2i (+1 for the slot bottom), y index 3j (+1, +2 for the slot walls)
  auto vid = [&](int xi, int yi, int zi) {
    auto key = std::make_tuple(xi, yi, zi);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const double x = (xi / 2 + (xi % 2 ? depth : 0.0)) / n;
    const double y = (yi / 3 + (yi % 3 == 1 ? ya : yi % 3 == 2 ? yb : 0.0)) / n;
    const VertexId v = b.add_vertex(Vec3(x, y, double(zi) / n));
    ids.emplace(key, v);
    return v;
  };
  FaceRegistry reg(b);
  // local 2D labels: (dx in {0, slot, 1}, dy in {0, a, b, 1})
  using P2 = std::array<int, 2>;
  const P2 c00{0, 0}, c10{2, 0}, c1a{2, 1}, c1b{2, 2}, c11{2, 3}, c01{0, 3}, c0b{0, 2}, cdb{1, 2}, cda{1, 1}, c0a{0, 1};
  const std::vector<P2> A{c00, c10, c1a, cda, c0a}, B{cda, c1a, c1b, cdb}, C{c11, c01, c0b, cdb, c1b};
  const std::vector<P2> F{c0a, cda, cdb, c0b};
  const std::vector<P2> U{c00, c10, c1a, c1b, c11, c01, c0b, cdb, cda, c0a};

  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        auto at = [&](const P2& p, int dz) { return vid(2 * i + p[0], 3 * j + p[1], k + dz); };
        auto level = [&](const std::vector<P2>& poly, int dz) {
          std::vector<VertexId> loop;
          for (const auto& p : poly) loop.push_back(at(p, dz));
          return loop;
        };
        auto walls = [&](const std::vector<P2>& cycle, std::vector<FaceId>& out) {
          for (std::size_t e = 0; e < cycle.size(); ++e) {
            const P2 &p = cycle[e], &q = cycle[(e + 1) % cycle.size()];
            out.push_back(reg.get({at(p, 0), at(q, 0), at(q, 1), at(p, 1)}));
          }
        };
        auto prism_tets = [&](const std::vector<P2>& piece, Side s) {
          std::vector<VertexId> lo = level(piece, 0), hi = level(piece, 1);
          std::vector<Vec3> pts;
          for (VertexId v : lo) pts.push_back(b.vertex(v));
          for (VertexId v : hi) pts.push_back(b.vertex(v));
          const VertexId g = b.add_vertex(centroid(pts));
          std::vector<SubTet> out;
          const std::size_t m = lo.size();
          for (std::size_t t = 1; t + 1 < m; ++t) {
            out.push_back({{g, lo[0], lo[t], lo[t + 1]}, s});
            out.push_back({{g, hi[0], hi[t], hi[t + 1]}, s});
          }
          for (std::size_t e = 0; e < m; ++e) {
            const std::size_t f = (e + 1) % m;
            out.push_back({{g, lo[e], lo[f], hi[f]}, s});
            out.push_back({{g, lo[e], hi[f], hi[e]}, s});
          }
          return out;
        };

        std::vector<FaceId> faces;
        for (const auto* piece : {&A, &B, &C}) {
          faces.push_back(reg.get(level(*piece, 0)));
          faces.push_back(reg.get(level(*piece, 1)));
        }
        walls(U, faces);
        std::vector<SubTet> sub;
        for (const auto* piece : {&A, &B, &C}) {
          auto t = prism_tets(*piece, Side::plus);
          sub.insert(sub.end(), t.begin(), t.end());
        }
        b.add_cell(faces, Material::plus, sub);

        if (with_filler) {
          std::vector<FaceId> ff{reg.get(level(F, 0)), reg.get(level(F, 1))};
          walls(F, ff);
          std::array<VertexId, 8> corners{at(c0a, 0), at(cda, 0), at(c0b, 0), at(cdb, 0),
                                          at(c0a, 1), at(cda, 1), at(c0b, 1), at(cdb, 1)};
          b.add_cell(ff, Material::plus, five_tets(corners, Side::plus));
        }
      }
  return b.finish();
}

} // namespace

PolyMesh notch_element(double depth, double width) { return build_notch(1, depth, width, false); }

PolyMesh notch_mesh(int n, double depth, double width) {
  if (n < 1) throw GeometryError("notch_mesh needs n >= 1");
  return build_notch(n, depth, width, true);
}

} // namespace anivem
