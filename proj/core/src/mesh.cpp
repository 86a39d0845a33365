#include "anivem/mesh.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <thread>

namespace anivem {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ANIVEM_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double tet_signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

Vec3 polygon_area_vector(const std::vector<Vec3>& pts) {
  Vec3 n = Vec3::Zero();
  const Vec3& o = pts.front();
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) n += (pts[i] - o).cross(pts[i + 1] - o);
  return 0.5 * n;
}

//--------------------------------------------------------------------------------
// PolyMesh
//--------------------------------------------------------------------------------

PolyMesh::PolyMesh(std::vector<Vec3> vertices, std::vector<Face> faces, std::vector<Cell> cells,
                   std::vector<VertexId> boundary_vertices)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), cells_(std::move(cells)),
      boundary_vertices_(std::move(boundary_vertices)) {
  vertex_dof_.assign(vertices_.size(), -1);
  for (const Face& f : faces_)
    for (const Tri& t : f.tris)
      for (VertexId v : t) {
        if (v < 0 || v >= static_cast<VertexId>(vertices_.size()))
          throw FormatError("triangle references vertex " + std::to_string(v) + " out of range");
        vertex_dof_[v] = 0;
      }
  for (VertexId v = 0; v < static_cast<VertexId>(vertices_.size()); ++v)
    if (vertex_dof_[v] == 0) {
      vertex_dof_[v] = static_cast<int>(dof_vertex_.size());
      dof_vertex_.push_back(v);
    }
  h_ = 0;
  for (CellId c = 0; c < static_cast<CellId>(cells_.size()); ++c) {
    auto vs = cell_vertices(c);
    double d = 0;
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j)
        d = std::max(d, (vertices_[vs[i]] - vertices_[vs[j]]).norm());
    cells_[c].diameter = d;
    h_ = std::max(h_, d);
  }
}

std::vector<int> PolyMesh::boundary_dofs() const {
  std::vector<int> out;
  for (VertexId v : boundary_vertices_)
    if (vertex_dof_[v] >= 0) out.push_back(vertex_dof_[v]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<OrientedTri> PolyMesh::cell_triangles(CellId c) const {
  std::vector<OrientedTri> out;
  for (const CellFace& cf : cells_[c].faces)
    for (const Tri& t : faces_[cf.id].tris)
      out.push_back({cf.flip ? Tri{t[0], t[2], t[1]} : t, cf.id});
  return out;
}

std::vector<VertexId> PolyMesh::cell_vertices(CellId c) const {
  std::vector<VertexId> vs;
  for (const CellFace& cf : cells_[c].faces)
    for (const Tri& t : faces_[cf.id].tris) vs.insert(vs.end(), t.begin(), t.end());
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

std::vector<std::pair<VertexId, VertexId>> PolyMesh::cell_edges(CellId c) const {
  std::set<std::pair<VertexId, VertexId>> edges;
  for (const CellFace& cf : cells_[c].faces) {
    const auto& loop = faces_[cf.id].loop;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      VertexId a = loop[i], b = loop[(i + 1) % loop.size()];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return {edges.begin(), edges.end()};
}

double PolyMesh::cell_volume(CellId c) const {
  double vol = 0;
  const Vec3 o = vertices_[cell_vertices(c).front()];
  for (const auto& t : cell_triangles(c))
    vol += tet_signed_volume(o, vertices_[t.v[0]], vertices_[t.v[1]], vertices_[t.v[2]]);
  return vol;
}

std::array<Vec3, 4> PolyMesh::subtet_points(const SubTet& t) const {
  return {vertices_[t.v[0]], vertices_[t.v[1]], vertices_[t.v[2]], vertices_[t.v[3]]};
}

double PolyMesh::subtet_volume(CellId c, std::optional<Side> side) const {
  double vol = 0;
  for (const SubTet& t : cells_[c].subtets) {
    if (side && t.tag != *side) continue;
    auto p = subtet_points(t);
    vol += std::abs(tet_signed_volume(p[0], p[1], p[2], p[3]));
  }
  return vol;
}

//--------------------------------------------------------------------------------
// MeshBuilder
//--------------------------------------------------------------------------------

VertexId MeshBuilder::add_vertex(const Vec3& x) {
  vertices_.push_back(x);
  return static_cast<VertexId>(vertices_.size() - 1);
}

FaceId MeshBuilder::add_face(std::vector<VertexId> loop, std::vector<Tri> tris) {
  Face f;
  f.loop = std::move(loop);
  f.tris = std::move(tris);
  faces_.push_back(std::move(f));
  return static_cast<FaceId>(faces_.size() - 1);
}

FaceId MeshBuilder::add_face(std::vector<VertexId> loop, std::optional<std::pair<int, int>> chord) {
  std::vector<Vec3> pts;
  for (VertexId v : loop) pts.push_back(vertices_[v]);
  std::vector<Tri> tris;
  for (const auto& t : triangulate_face(pts, chord)) tris.push_back({loop[t[0]], loop[t[1]], loop[t[2]]});
  return add_face(std::move(loop), std::move(tris));
}

CellId MeshBuilder::add_cell(std::vector<FaceId> faces, Material tag, std::vector<SubTet> subtets,
                             std::optional<InterfacePlane> iface) {
  Cell c;
  for (FaceId f : faces) c.faces.push_back({f, false});
  c.tag = tag;
  c.subtets = std::move(subtets);
  c.iface = std::move(iface);
  cells_.push_back(std::move(c));
  return static_cast<CellId>(cells_.size() - 1);
}

namespace {

// Chooses flip flags so that the cell boundary is consistently and outward oriented.
void orient_cell(Cell& cell, const std::vector<Face>& faces, const std::vector<Vec3>& x, CellId id) {
  const std::size_t nf = cell.faces.size();
  // undirected edge -> (local face, +1 if the face traverses it low->high)
  std::map<std::pair<VertexId, VertexId>, std::vector<std::pair<int, int>>> edges;
  for (std::size_t i = 0; i < nf; ++i)
    for (const Tri& t : faces[cell.faces[i].id].tris)
      for (int k = 0; k < 3; ++k) {
        VertexId a = t[k], b = t[(k + 1) % 3];
        edges[{std::min(a, b), std::max(a, b)}].push_back({static_cast<int>(i), a < b ? 1 : -1});
      }
  std::vector<int> state(nf, -1);  // -1 unknown, 0 keep, 1 flip
  for (std::size_t seed = 0; seed < nf; ++seed) {
    if (state[seed] >= 0) continue;
    state[seed] = 0;
    std::queue<int> todo;
    todo.push(static_cast<int>(seed));
    while (!todo.empty()) {
      int i = todo.front();
      todo.pop();
      for (const auto& [key, uses] : edges) {
        int dir_i = 0;
        for (const auto& [fi, d] : uses)
          if (fi == i) dir_i = d;
        if (dir_i == 0) continue;
        const int eff_i = state[i] ? -dir_i : dir_i;
        for (const auto& [fj, d] : uses) {
          if (fj == i || state[fj] >= 0) continue;
          state[fj] = (d == eff_i) ? 1 : 0;
          todo.push(fj);
        }
      }
    }
  }
  for (std::size_t i = 0; i < nf; ++i) cell.faces[i].flip = state[i] == 1;
  double vol = 0;
  for (const CellFace& cf : cell.faces)
    for (const Tri& t : faces[cf.id].tris) {
      const double v = x[t[0]].dot(x[t[1]].cross(x[t[2]])) / 6.0;
      vol += cf.flip ? -v : v;
    }
  if (vol == 0) throw GeometryError("cell " + std::to_string(id) + " has zero volume");
  if (vol < 0)
    for (CellFace& cf : cell.faces) cf.flip = !cf.flip;
}

} // namespace

PolyMesh MeshBuilder::finish() {
  std::vector<int> used(faces_.size(), 0);
  for (auto& c : cells_)
    for (auto& cf : c.faces) used[cf.id] = 1;
  std::vector<FaceId> remap(faces_.size(), -1);
  std::vector<Face> faces;
  for (std::size_t f = 0; f < faces_.size(); ++f)
    if (used[f]) {
      remap[f] = static_cast<FaceId>(faces.size());
      faces.push_back(faces_[f]);
    }
  for (auto& c : cells_)
    for (auto& cf : c.faces) cf.id = remap[cf.id];

  for (CellId c = 0; c < static_cast<CellId>(cells_.size()); ++c) {
    orient_cell(cells_[c], faces, vertices_, c);
    for (const CellFace& cf : cells_[c].faces) {
      Face& f = faces[cf.id];
      if (f.cells[0] < 0)
        f.cells[0] = c;
      else if (f.cells[1] < 0)
        f.cells[1] = c;
      else
        throw GeometryError("face " + std::to_string(cf.id) + " referenced by more than two cells");
    }
  }
  std::vector<VertexId> boundary;
  for (const Face& f : faces)
    if (f.cells[1] < 0)
      for (const Tri& t : f.tris) boundary.insert(boundary.end(), t.begin(), t.end());
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  PolyMesh mesh(std::move(vertices_), std::move(faces), std::move(cells_), std::move(boundary));
  *this = MeshBuilder();
  return mesh;
}

//--------------------------------------------------------------------------------
// Validation
//--------------------------------------------------------------------------------

std::string ValidationReport::summary() const {
  std::ostringstream os;
  if (ok()) return "ok";
  os << violations.size() << " violation(s):";
  for (const auto& v : violations) os << "\n  " << v;
  return os.str();
}

ValidationReport validate(const PolyMesh& mesh) {
  ValidationReport rep;
  auto add = [&](std::string s) { rep.violations.push_back(std::move(s)); };
  const auto& X = mesh.vertices();
  const int nv = static_cast<int>(X.size());
  const int nf = static_cast<int>(mesh.faces().size());
  const int nc = static_cast<int>(mesh.num_cells());

  // faces: indices, planarity, area, orientation
  std::map<std::vector<VertexId>, FaceId> seen;
  for (FaceId f = 0; f < nf; ++f) {
    const Face& face = mesh.face(f);
    const std::string name = "face " + std::to_string(f);
    bool bad = face.loop.size() < 3 || face.tris.empty();
    for (VertexId v : face.loop) bad = bad || v < 0 || v >= nv;
    for (const Tri& t : face.tris) {
      for (VertexId v : t) bad = bad || v < 0 || v >= nv;
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
        add(name + " has a triangle with duplicate vertex ids");
        bad = true;
      }
    }
    if (bad) {
      add(name + " is malformed");
      continue;
    }
    std::vector<Vec3> pts;
    for (VertexId v : face.loop) pts.push_back(X[v]);
    const Vec3 av = polygon_area_vector(pts);
    const double area = av.norm();
    double diam = 0;
    for (const auto& p : pts)
      for (const auto& q : pts) diam = std::max(diam, (p - q).norm());
    if (area <= 1e-14 * diam * diam) {
      add(name + " is degenerate");
      continue;
    }
    const Vec3 n = av / area;
    double tri_area = 0;
    for (const Tri& t : face.tris) {
      Vec3 tv = 0.5 * (X[t[1]] - X[t[0]]).cross(X[t[2]] - X[t[0]]);
      if (tv.dot(n) <= 0) add(name + " has a triangle against the loop orientation");
      tri_area += tv.norm();
      for (VertexId v : t)
        if (std::abs((X[v] - pts[0]).dot(n)) > 1e-10 * diam) add(name + " has an off-plane triangle vertex");
    }
    if (std::abs(tri_area - area) > 1e-12 * area) add(name + " area mismatch");
    std::vector<VertexId> key = face.loop;
    std::sort(key.begin(), key.end());
    auto [it, inserted] = seen.emplace(key, f);
    if (!inserted) add(name + " not shared: duplicates face " + std::to_string(it->second));
  }
  if (!rep.ok()) return rep;

  // face/cell incidence
  std::vector<std::vector<std::pair<CellId, bool>>> refs(nf);
  for (CellId c = 0; c < nc; ++c)
    for (const CellFace& cf : mesh.cell(c).faces) {
      if (cf.id < 0 || cf.id >= nf) {
        add("cell " + std::to_string(c) + " references missing face " + std::to_string(cf.id));
        continue;
      }
      refs[cf.id].push_back({c, cf.flip});
    }
  if (!rep.ok()) return rep;
  for (FaceId f = 0; f < nf; ++f) {
    const auto& r = refs[f];
    const Face& face = mesh.face(f);
    const std::string name = "face " + std::to_string(f);
    if (r.empty() || r.size() > 2) {
      add(name + " is referenced by " + std::to_string(r.size()) + " cells");
      continue;
    }
    if (r.size() == 2 && r[0].second == r[1].second) add(name + " has equal orientation in both cells");
    std::set<CellId> listed;
    for (CellId c : face.cells)
      if (c >= 0) listed.insert(c);
    std::set<CellId> actual;
    for (const auto& [c, fl] : r) actual.insert(c);
    if (listed != actual) add(name + " cell list does not match cell references");
  }

  // cells: closed, outward, sub-tets tile the cell
  for (CellId c = 0; c < nc; ++c) {
    const std::string name = "cell " + std::to_string(c);
    std::map<std::pair<VertexId, VertexId>, int> directed;
    for (const auto& t : mesh.cell_triangles(c))
      for (int k = 0; k < 3; ++k) directed[{t.v[k], t.v[(k + 1) % 3]}]++;
    bool closed = true;
    for (const auto& [e, cnt] : directed) {
      auto rev = directed.find({e.second, e.first});
      if (cnt != 1 || rev == directed.end() || rev->second != 1) {
        if (closed)
          add(name + " not watertight at edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")");
        closed = false;
      }
    }
    if (!closed) continue;
    const double vol = mesh.cell_volume(c);
    if (vol <= 0) {
      add(name + " boundary is not outward oriented");
      continue;
    }
    const Cell& cell = mesh.cell(c);
    for (const SubTet& t : cell.subtets)
      for (VertexId v : t.v)
        if (v < 0 || v >= nv) add(name + " sub-tet vertex out of range");
    if (!rep.ok()) continue;
    const double sub = mesh.subtet_volume(c);
    if (std::abs(sub - vol) > 1e-12 * vol) add(name + " sub-tet volume mismatch");
    if (cell.tag == Material::interface && !cell.iface) add(name + " is tagged interface without interface data");
    if (cell.iface) {
      for (const SubTet& t : cell.subtets) {
        auto p = mesh.subtet_points(t);
        Vec3 g = 0.25 * (p[0] + p[1] + p[2] + p[3]);
        if (cell.iface->side_of(g) != t.tag) {
          add(name + " sub-tet on the wrong side of the interface");
          break;
        }
      }
    } else {
      const Side expect = cell.tag == Material::minus ? Side::minus : Side::plus;
      for (const SubTet& t : cell.subtets)
        if (t.tag != expect) {
          add(name + " sub-tet tag differs from the cell tag");
          break;
        }
    }
    double d = 0;
    auto vs = mesh.cell_vertices(c);
    for (VertexId a : vs)
      for (VertexId b : vs) d = std::max(d, (X[a] - X[b]).norm());
    if (std::abs(d - cell.diameter) > 1e-12 * d) add(name + " cached diameter is stale");
  }

  // domain boundary closed and boundary marks
  std::map<std::pair<VertexId, VertexId>, int> bedges;
  std::set<VertexId> bverts;
  for (FaceId f = 0; f < nf; ++f)
    if (refs[f].size() == 1)
      for (const Tri& t : mesh.face(f).tris)
        for (int k = 0; k < 3; ++k) {
          VertexId a = t[k], b = t[(k + 1) % 3];
          bedges[{std::min(a, b), std::max(a, b)}]++;
          bverts.insert(a);
        }
  for (const auto& [e, cnt] : bedges)
    if (cnt % 2) {
      add("domain boundary not closed at edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")");
      break;
    }
  std::set<VertexId> marked(mesh.boundary_vertices().begin(), mesh.boundary_vertices().end());
  if (marked != bverts) add("boundary vertex marks do not match the boundary faces");

  // DoF numbering
  for (std::size_t d = 0; d < mesh.num_dofs(); ++d)
    if (mesh.dof_of_vertex(mesh.vertex_of_dof(static_cast<int>(d))) != static_cast<int>(d)) {
      add("DoF numbering is not a bijection");
      break;
    }
  double h = 0;
  for (const Cell& c : mesh.cells()) h = std::max(h, c.diameter);
  if (h != mesh.h()) add("cached mesh size is stale");
  return rep;
}

} // namespace anivem
