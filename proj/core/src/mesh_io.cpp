#include "anivem/mesh.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace anivem {

using json = nlohmann::ordered_json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(where + ": missing key '" + key + "'");
  return *it;
}

const json& need_array(const json& j, const char* key, const std::string& where) {
  const json& a = need(j, key, where);
  if (!a.is_array()) throw FormatError(where + ": key '" + key + "' must be an array");
  return a;
}

Vec3 read_vec(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw FormatError(where + ": expected [x,y,z]");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw FormatError(where + ": coordinate is not a number");
    v[k] = j[k].get<double>();
  }
  return v;
}

int read_index(const json& j, int bound, const std::string& where) {
  if (!j.is_number_integer()) throw FormatError(where + ": expected an integer index");
  int v = j.get<int>();
  if (v < 0 || v >= bound) throw FormatError(where + ": index " + std::to_string(v) + " out of range");
  return v;
}

Side read_side(const json& j, const std::string& where) {
  if (j == "plus") return Side::plus;
  if (j == "minus") return Side::minus;
  throw FormatError(where + ": tag must be 'plus' or 'minus'");
}

const char* material_name(Material m) {
  switch (m) {
    case Material::plus: return "plus";
    case Material::minus: return "minus";
    default: return "interface";
  }
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace

std::string to_json(const PolyMesh& mesh) {
  json j;
  json verts = json::array();
  for (const auto& x : mesh.vertices()) verts.push_back(vec_json(x));
  j["vertices"] = std::move(verts);
  json faces = json::array();
  for (const Face& f : mesh.faces()) {
    json jf;
    jf["loop"] = f.loop;
    json tris = json::array();
    for (const Tri& t : f.tris) tris.push_back({t[0], t[1], t[2]});
    jf["tris"] = std::move(tris);
    jf["cells"] = {f.cells[0], f.cells[1]};
    faces.push_back(std::move(jf));
  }
  j["faces"] = std::move(faces);
  json cells = json::array();
  for (const Cell& c : mesh.cells()) {
    json jc;
    json cf = json::array();
    for (const CellFace& f : c.faces) cf.push_back({{"id", f.id}, {"flip", f.flip}});
    jc["faces"] = std::move(cf);
    jc["tag"] = material_name(c.tag);
    json st = json::array();
    for (const SubTet& t : c.subtets)
      st.push_back({{"v", {t.v[0], t.v[1], t.v[2], t.v[3]}}, {"tag", t.tag == Side::minus ? "minus" : "plus"}});
    jc["subtets"] = std::move(st);
    if (c.iface) {
      const auto& p = *c.iface;
      jc["interface"] = {{"polygon", p.polygon}, {"normal", vec_json(p.normal)}, {"t1", vec_json(p.t1)},
                         {"t2", vec_json(p.t2)}, {"anchor", vec_json(p.anchor)}};
    }
    cells.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells);
  j["boundary_dofs"] = mesh.boundary_vertices();
  return j.dump(1);
}

PolyMesh mesh_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw FormatError("mesh JSON parse error at line " + std::to_string(line) + ": " + e.what());
  }
  std::vector<Vec3> vertices;
  for (const auto& v : need_array(j, "vertices", "mesh")) vertices.push_back(read_vec(v, "vertices"));
  const int nv = static_cast<int>(vertices.size());
  const json& jfaces = need_array(j, "faces", "mesh");
  const json& jcells = need_array(j, "cells", "mesh");
  const int nf = static_cast<int>(jfaces.size());
  const int nc = static_cast<int>(jcells.size());

  std::vector<Face> faces;
  for (int f = 0; f < nf; ++f) {
    const std::string where = "faces[" + std::to_string(f) + "]";
    const json& jf = jfaces[f];
    Face face;
    for (const auto& v : need_array(jf, "loop", where)) face.loop.push_back(read_index(v, nv, where + ".loop"));
    for (const auto& t : need_array(jf, "tris", where)) {
      if (!t.is_array() || t.size() != 3) throw FormatError(where + ".tris: expected [a,b,c]");
      Tri tri{read_index(t[0], nv, where), read_index(t[1], nv, where), read_index(t[2], nv, where)};
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
        throw FormatError(where + ".tris: duplicate vertex ids in a triangle");
      face.tris.push_back(tri);
    }
    const json& jc = need_array(jf, "cells", where);
    if (jc.size() != 2) throw FormatError(where + ".cells: expected [c0, c1]");
    for (int k = 0; k < 2; ++k) {
      if (!jc[k].is_number_integer()) throw FormatError(where + ".cells: expected integers");
      face.cells[k] = jc[k].get<int>();
      if (face.cells[k] < -1 || face.cells[k] >= nc) throw FormatError(where + ".cells: cell out of range");
    }
    faces.push_back(std::move(face));
  }

  std::vector<Cell> cells;
  for (int c = 0; c < nc; ++c) {
    const std::string where = "cells[" + std::to_string(c) + "]";
    const json& jc = jcells[c];
    Cell cell;
    for (const auto& cf : need_array(jc, "faces", where)) {
      const json& flip = need(cf, "flip", where + ".faces");
      if (!flip.is_boolean()) throw FormatError(where + ".faces: flip must be a boolean");
      cell.faces.push_back({read_index(need(cf, "id", where + ".faces"), nf, where + ".faces"), flip.get<bool>()});
    }
    const json& tag = need(jc, "tag", where);
    if (tag == "plus")
      cell.tag = Material::plus;
    else if (tag == "minus")
      cell.tag = Material::minus;
    else if (tag == "interface")
      cell.tag = Material::interface;
    else
      throw FormatError(where + ": tag must be plus, minus or interface");
    for (const auto& st : need_array(jc, "subtets", where)) {
      SubTet t;
      const json& v = need_array(st, "v", where + ".subtets");
      if (v.size() != 4) throw FormatError(where + ".subtets: expected 4 vertices");
      for (int k = 0; k < 4; ++k) t.v[k] = read_index(v[k], nv, where + ".subtets");
      t.tag = read_side(need(st, "tag", where + ".subtets"), where + ".subtets");
      cell.subtets.push_back(t);
    }
    if (auto it = jc.find("interface"); it != jc.end()) {
      const std::string w = where + ".interface";
      InterfacePlane p;
      for (const auto& v : need_array(*it, "polygon", w)) p.polygon.push_back(read_index(v, nv, w));
      p.normal = read_vec(need(*it, "normal", w), w);
      p.t1 = read_vec(need(*it, "t1", w), w);
      p.t2 = read_vec(need(*it, "t2", w), w);
      p.anchor = read_vec(need(*it, "anchor", w), w);
      cell.iface = std::move(p);
    }
    cells.push_back(std::move(cell));
  }
  std::vector<VertexId> boundary;
  for (const auto& v : need_array(j, "boundary_dofs", "mesh")) boundary.push_back(read_index(v, nv, "boundary_dofs"));
  return PolyMesh(std::move(vertices), std::move(faces), std::move(cells), std::move(boundary));
}

void save_json(const PolyMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << to_json(mesh) << '\n';
}

PolyMesh load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return mesh_from_json(ss.str());
}

//--------------------------------------------------------------------------------
// VTK
//--------------------------------------------------------------------------------

std::string to_vtk(const PolyMesh& mesh, const std::vector<VtkField>& fields) {
  const std::size_t nc = mesh.num_cells();
  std::size_t ntet = 0;
  for (const Cell& c : mesh.cells()) ntet += c.subtets.size();
  for (const auto& f : fields) {
    const std::size_t want = f.per_cell ? nc : mesh.num_dofs();
    if (f.values.size() != want)
      throw Error("field '" + f.name + "' has " + std::to_string(f.values.size()) + " values, expected " +
                  std::to_string(want));
  }
  std::ostringstream os;
  os << "# vtk DataFile Version 2.0\nanivem polyhedral mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.vertices().size() << " double\n";
  for (const auto& x : mesh.vertices()) os << num(x.x()) << ' ' << num(x.y()) << ' ' << num(x.z()) << '\n';
  os << "CELLS " << ntet << ' ' << 5 * ntet << '\n';
  for (const Cell& c : mesh.cells())
    for (const SubTet& t : c.subtets) os << "4 " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.v[3] << '\n';
  os << "CELL_TYPES " << ntet << '\n';
  for (std::size_t i = 0; i < ntet; ++i) os << "10\n";
  os << "CELL_DATA " << ntet << "\nSCALARS cell_id int 1\nLOOKUP_TABLE default\n";
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t k = 0; k < mesh.cell(c).subtets.size(); ++k) os << c << '\n';
  os << "SCALARS side int 1\nLOOKUP_TABLE default\n";
  for (const Cell& c : mesh.cells())
    for (const SubTet& t : c.subtets) os << side_sign(t.tag) << '\n';
  for (const auto& f : fields) {
    if (!f.per_cell) continue;
    os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t k = 0; k < mesh.cell(c).subtets.size(); ++k) os << num(f.values[c]) << '\n';
  }
  bool any_point = false;
  for (const auto& f : fields) any_point = any_point || !f.per_cell;
  if (any_point) {
    const std::size_t np = mesh.vertices().size();
    os << "POINT_DATA " << np << '\n';
    for (const auto& f : fields) {
      if (f.per_cell) continue;
      // interior helper vertices take the mean of their cell's trace values
      std::vector<double> pv(np, 0.0);
      std::vector<char> set(np, 0);
      for (std::size_t v = 0; v < np; ++v)
        if (int d = mesh.dof_of_vertex(static_cast<VertexId>(v)); d >= 0) {
          pv[v] = f.values[d];
          set[v] = 1;
        }
      for (std::size_t c = 0; c < nc; ++c) {
        auto vs = mesh.cell_vertices(static_cast<CellId>(c));
        double mean = 0;
        for (VertexId v : vs) mean += pv[v];
        mean /= static_cast<double>(vs.size());
        for (const SubTet& t : mesh.cell(c).subtets)
          for (VertexId v : t.v)
            if (!set[v]) {
              pv[v] = mean;
              set[v] = 1;
            }
      }
      os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double x : pv) os << num(x) << '\n';
    }
  }
  return os.str();
}

void export_vtk(const PolyMesh& mesh, const std::vector<VtkField>& fields, const std::string& path) {
  std::string text = to_vtk(mesh, fields);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

} // namespace anivem
