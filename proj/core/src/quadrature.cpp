#include "anivem/quadrature.hpp"

#include <algorithm>

namespace anivem {

namespace {

TriRule make_tri(int degree) {
  TriRule r{degree, {}, {}};
  auto add = [&](double a, double b, double c, double w) {
    r.bary.emplace_back(a, b, c);
    r.weights.push_back(w);
  };
  if (degree <= 1) {
    r.degree = 1;
    add(1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0);
  } else if (degree == 2) {
    add(2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3);
    add(1.0 / 6, 2.0 / 3, 1.0 / 6, 1.0 / 3);
    add(1.0 / 6, 1.0 / 6, 2.0 / 3, 1.0 / 3);
  } else {
    // six-point rule, positive weights, exact for degree 4
    r.degree = 4;
    const double a = 0.445948490915965, wa = 0.223381589678011;
    const double b = 0.091576213509771, wb = 0.109951743655322;
    add(1 - 2 * a, a, a, wa);
    add(a, 1 - 2 * a, a, wa);
    add(a, a, 1 - 2 * a, wa);
    add(1 - 2 * b, b, b, wb);
    add(b, 1 - 2 * b, b, wb);
    add(b, b, 1 - 2 * b, wb);
  }
  return r;
}

TetRule make_tet(int degree) {
  TetRule r{degree, {}, {}};
  auto add = [&](double a, double b, double c, double d, double w) {
    r.bary.emplace_back(a, b, c, d);
    r.weights.push_back(w);
  };
  auto add4 = [&](double a, double w) {
    const double b = 1 - 3 * a;
    add(b, a, a, a, w);
    add(a, b, a, a, w);
    add(a, a, b, a, w);
    add(a, a, a, b, w);
  };
  if (degree <= 1) {
    r.degree = 1;
    add(0.25, 0.25, 0.25, 0.25, 1.0);
  } else if (degree == 2) {
    add4(0.1381966011250105, 0.25);
  } else {
    // fourteen-point rule, positive weights, exact for degree 5
    r.degree = 5;
    add4(0.31088591926330060980, 0.11268792571801585);
    add4(0.092735250310891226402, 0.07349304311636195);
    const double b = 0.045503704125649649492, c = 0.5 - b, w = 0.042546020777081466;
    add(b, b, c, c, w);
    add(b, c, b, c, w);
    add(b, c, c, b, w);
    add(c, b, b, c, w);
    add(c, b, c, b, w);
    add(c, c, b, b, w);
  }
  return r;
}

} // namespace

const TriRule& tri_rule(int degree) {
  static const TriRule rules[] = {make_tri(1), make_tri(2), make_tri(3)};
  if (degree < 0 || degree > 4) throw Error("triangle rule degree must be at most 4");
  return rules[std::clamp(degree, 1, 3) - 1];
}

const TetRule& tet_rule(int degree) {
  static const TetRule rules[] = {make_tet(1), make_tet(2), make_tet(3)};
  if (degree < 0 || degree > 4) throw Error("tetrahedron rule degree must be at most 4");
  return rules[std::clamp(degree, 1, 3) - 1];
}

double integrate_triangle(const std::array<Vec3, 3>& t, const std::function<double(const Vec3&)>& f, int degree) {
  const TriRule& r = tri_rule(degree);
  double s = 0;
  for (std::size_t q = 0; q < r.weights.size(); ++q)
    s += r.weights[q] * f(r.bary[q][0] * t[0] + r.bary[q][1] * t[1] + r.bary[q][2] * t[2]);
  return s * triangle_area(t[0], t[1], t[2]);
}

double integrate_tet(const std::array<Vec3, 4>& t, const std::function<double(const Vec3&)>& f, int degree) {
  const TetRule& r = tet_rule(degree);
  double s = 0;
  for (std::size_t q = 0; q < r.weights.size(); ++q) {
    const auto& b = r.bary[q];
    s += r.weights[q] * f(b[0] * t[0] + b[1] * t[1] + b[2] * t[2] + b[3] * t[3]);
  }
  return s * std::abs(tet_signed_volume(t[0], t[1], t[2], t[3]));
}

double integrate_cell(const PolyMesh& mesh, CellId c, const SidedFunction& f, int degree) {
  double s = 0;
  for (const SubTet& t : mesh.cell(c).subtets)
    s += integrate_tet(mesh.subtet_points(t), [&](const Vec3& x) { return f(x, t.tag); }, degree);
  return s;
}

Side triangle_side(const PolyMesh& mesh, CellId c, const Tri& t) {
  const Cell& cell = mesh.cell(c);
  if (cell.iface) {
    const Vec3 g = (mesh.vertex(t[0]) + mesh.vertex(t[1]) + mesh.vertex(t[2])) / 3.0;
    return cell.iface->side_of(g);
  }
  return cell.tag == Material::minus ? Side::minus : Side::plus;
}

double integrate_boundary(const PolyMesh& mesh, CellId c, const SidedFunction& f, int degree) {
  double s = 0;
  for (const auto& t : mesh.cell_triangles(c)) {
    const Side side = triangle_side(mesh, c, t.v);
    s += integrate_triangle({mesh.vertex(t.v[0]), mesh.vertex(t.v[1]), mesh.vertex(t.v[2])},
                            [&](const Vec3& x) { return f(x, side); }, degree);
  }
  return s;
}

} // namespace anivem
