#include "anivem/vem.hpp"

#include <cmath>
#include <map>

namespace anivem {

namespace {

struct LocalTri {
  std::array<int, 3> v;  // local indices
  Vec3 area_vector;      // outward normal times area
  Vec3 centroid;
  Side side;
};

struct CellData {
  std::vector<VertexId> ids;
  std::map<VertexId, int> local;
  std::vector<LocalTri> tris;
};

CellData cell_data(const PolyMesh& mesh, CellId c) {
  CellData d;
  d.ids = mesh.cell_vertices(c);
  for (std::size_t i = 0; i < d.ids.size(); ++i) d.local[d.ids[i]] = static_cast<int>(i);
  for (const auto& t : mesh.cell_triangles(c)) {
    const Vec3 &a = mesh.vertex(t.v[0]), &b = mesh.vertex(t.v[1]), &e = mesh.vertex(t.v[2]);
    d.tris.push_back({{d.local[t.v[0]], d.local[t.v[1]], d.local[t.v[2]]},
                      0.5 * (b - a).cross(e - a),
                      (a + b + e) / 3.0,
                      triangle_side(mesh, c, t.v)});
  }
  return d;
}

// Zero-mean complement of the constants in the boundary mass inner product.
Eigen::MatrixXd zero_mean_basis(const Eigen::MatrixXd& M) {
  const Eigen::VectorXd w = M * Eigen::VectorXd::Ones(M.rows());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
  Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(M.rows() - 1);
}

} // namespace

ProjectionSpace projection_space(const PolyMesh& mesh, CellId c, double beta_minus, double beta_plus) {
  const Cell& cell = mesh.cell(c);
  if (cell.iface) return ProjectionSpace::immersed(*cell.iface, beta_minus, beta_plus);
  Vec3 g = Vec3::Zero();
  const auto vs = mesh.cell_vertices(c);
  for (VertexId v : vs) g += mesh.vertex(v);
  return ProjectionSpace::linear(g / double(vs.size()), cell.tag == Material::minus ? beta_minus : beta_plus);
}

Mat3 gradient_gram(const PolyMesh& mesh, CellId c, const ProjectionSpace& space) {
  if (!space.is_immersed()) {
    const Mat3& g = space.grad_plus;
    return space.beta_plus * mesh.subtet_volume(c) * g.transpose() * g;
  }
  Mat3 G = Mat3::Zero();
  for (Side s : {Side::minus, Side::plus}) {
    const Mat3& g = space.gradients(s);
    G += space.beta(s) * mesh.subtet_volume(c, s) * g.transpose() * g;
  }
  return G;
}

Eigen::MatrixXd projection_matrix(const PolyMesh& mesh, CellId c, const ProjectionSpace& space, double* condition) {
  const CellData d = cell_data(mesh, c);
  const int n = static_cast<int>(d.ids.size());
  const Mat3 G = gradient_gram(mesh, c, space);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(3, n);
  Eigen::VectorXd hat = Eigen::VectorXd::Zero(n);
  Eigen::Vector3d mean_w = Eigen::Vector3d::Zero();
  double perimeter = 0;
  for (const auto& t : d.tris) {
    const Eigen::Vector3d flux = space.beta(t.side) * space.gradients(t.side).transpose() * t.area_vector;
    const double area = t.area_vector.norm();
    for (int i : t.v) {
      R.col(i) += flux / 3.0;
      hat[i] += area / 3.0;
    }
    mean_w += area * space.values(t.centroid, t.side).tail<3>();
    perimeter += area;
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(G);
  const double lmin = eig.eigenvalues()[0], lmax = eig.eigenvalues()[2];
  if (!(lmin > 1e-14 * lmax) || !(lmax > 0))
    throw GeometryError("cell " + std::to_string(c) + " has a singular projection Gram matrix");
  if (condition) *condition = lmax / lmin;
  Eigen::MatrixXd D(4, n);
  D.bottomRows(3) = Eigen::PartialPivLU<Mat3>(G).solve(R);
  for (int i = 0; i < n; ++i) D(0, i) = (hat[i] - mean_w.dot(D.col(i).tail<3>())) / perimeter;
  return D;
}

Eigen::MatrixXd face_stabilization(const PolyMesh& mesh, CellId c) {
  const CellData d = cell_data(mesh, c);
  const int n = static_cast<int>(d.ids.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : d.tris) {
    const double area = t.area_vector.norm();
    const Vec3 nrm = t.area_vector / area;
    std::array<Vec3, 3> g;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = mesh.vertex(d.ids[t.v[(k + 2) % 3]]) - mesh.vertex(d.ids[t.v[(k + 1) % 3]]);
      g[k] = nrm.cross(e) / (2 * area);
    }
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) S(t.v[a], t.v[b]) += area * g[a].dot(g[b]);
  }
  return mesh.cell(c).diameter * S;
}

Eigen::MatrixXd edge_stabilization(const PolyMesh& mesh, CellId c) {
  const auto ids = mesh.cell_vertices(c);
  std::map<VertexId, int> local;
  for (std::size_t i = 0; i < ids.size(); ++i) local[ids[i]] = static_cast<int>(i);
  const int n = static_cast<int>(ids.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [a, b] : mesh.cell_edges(c)) {
    const double len = (mesh.vertex(a) - mesh.vertex(b)).norm();
    const int i = local.at(a), j = local.at(b);
    S(i, i) += 1 / len;
    S(j, j) += 1 / len;
    S(i, j) -= 1 / len;
    S(j, i) -= 1 / len;
  }
  const double h = mesh.cell(c).diameter;
  return h * h * S;
}

Eigen::MatrixXd boundary_mass(const PolyMesh& mesh, CellId c) {
  const CellData d = cell_data(mesh, c);
  const int n = static_cast<int>(d.ids.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : d.tris) {
    const double area = t.area_vector.norm();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) M(t.v[a], t.v[b]) += area / 12.0 * (a == b ? 2.0 : 1.0);
  }
  return M;
}

LocalOperators local_operators(const PolyMesh& mesh, CellId c, const LocalParams& params) {
  LocalOperators op;
  op.vertices = mesh.cell_vertices(c);
  op.space = projection_space(mesh, c, params.beta_minus, params.beta_plus);
  const int n = static_cast<int>(op.vertices.size());
  op.projection = projection_matrix(mesh, c, op.space, &op.gram_condition);
  Eigen::Matrix4d Ghat = Eigen::Matrix4d::Zero();
  Ghat.bottomRightCorner<3, 3>() = gradient_gram(mesh, c, op.space);
  op.consistency = op.projection.transpose() * Ghat * op.projection;
  op.stabilization =
      params.stabilization == Stabilization::face ? face_stabilization(mesh, c) : edge_stabilization(mesh, c);
  Eigen::MatrixXd E(n, 4);
  for (int i = 0; i < n; ++i) E.row(i) = op.space.values(mesh.vertex(op.vertices[i])).transpose();
  const Eigen::MatrixXd IP = Eigen::MatrixXd::Identity(n, n) - E * op.projection;
  op.stiffness = op.consistency + IP.transpose() * op.stabilization * IP;
  op.stiffness = 0.5 * (op.stiffness + op.stiffness.transpose());
  op.load = Eigen::VectorXd::Zero(n);
  if (params.source) {
    const TetRule& rule = tet_rule(2);
    Vec4 acc = Vec4::Zero();
    for (const SubTet& t : mesh.cell(c).subtets) {
      const auto p = mesh.subtet_points(t);
      const double vol = std::abs(tet_signed_volume(p[0], p[1], p[2], p[3]));
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const auto& b = rule.bary[q];
        const Vec3 x = b[0] * p[0] + b[1] * p[1] + b[2] * p[2] + b[3] * p[3];
        acc += rule.weights[q] * vol * params.source(x, t.tag) * op.space.values(x, t.tag);
      }
    }
    op.load = op.projection.transpose() * acc;
  }
  return op;
}

Eigen::VectorXd interpolate_boundary(const PolyMesh& mesh, CellId c, const std::function<double(const Vec3&)>& u) {
  const auto ids = mesh.cell_vertices(c);
  Eigen::VectorXd v(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) v[i] = u(mesh.vertex(ids[i]));
  return v;
}

Vec4 quasi_interp_JK(const PolyMesh& mesh, CellId c, const ProjectionSpace& space,
                     const std::function<double(const Vec3&)>& u_minus) {
  if (!space.is_immersed()) throw GeometryError("quasi-interpolation needs an interface cell");
  std::vector<CellId> patch{c};
  for (const CellFace& cf : mesh.cell(c).faces)
    for (CellId o : mesh.face(cf.id).cells)
      if (o >= 0 && o != c) patch.push_back(o);
  const Vec3 xK = space.anchor;
  const double h = mesh.cell(c).diameter;
  // weighted least squares in a basis centred at the anchor and scaled by h_K
  const TetRule& rule = tet_rule(4);
  std::vector<Vec4> rows;
  std::vector<double> vals;
  for (CellId k : patch)
    for (const SubTet& t : mesh.cell(k).subtets) {
      const auto p = mesh.subtet_points(t);
      const double vol = std::abs(tet_signed_volume(p[0], p[1], p[2], p[3]));
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const auto& b = rule.bary[q];
        const Vec3 x = b[0] * p[0] + b[1] * p[1] + b[2] * p[2] + b[3] * p[3];
        const double sw = std::sqrt(rule.weights[q] * vol);
        Vec4 phi;
        phi << 1, (x - xK) / h;
        rows.push_back(sw * phi);
        vals.push_back(sw * u_minus(x));
      }
    }
  Eigen::MatrixXd A(rows.size(), 4);
  Eigen::VectorXd rhs(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    rhs[static_cast<Eigen::Index>(i)] = vals[i];
  }
  const Vec4 a = A.colPivHouseholderQr().solve(rhs);
  const Vec3 pm = a.tail<3>() / h;
  const Vec3& n = space.plane->normal;
  const double ratio = space.beta_minus / space.beta_plus;
  const Vec3 pp = pm + (ratio - 1) * pm.dot(n) * n;
  Vec4 out;
  out << a[0], pp;
  return out;
}

double h2_rayleigh(const PolyMesh& mesh, CellId c, int iterations) {
  const Eigen::MatrixXd M = boundary_mass(mesh, c);
  const Eigen::MatrixXd S = mesh.cell(c).diameter * face_stabilization(mesh, c);
  const int n = static_cast<int>(M.rows());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd w = M * ones;
  const double total = ones.dot(w);
  const Eigen::MatrixXd B = S + w * w.transpose() / total;
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw GeometryError("cell " + std::to_string(c) + " has a disconnected boundary");
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = std::fmod(0.6180339887498949 * (i + 1), 1.0) - 0.5;
  auto deflate = [&](Eigen::VectorXd& x) {
    x -= (w.dot(x) / total) * ones;
    x /= std::sqrt(x.dot(M * x));
  };
  deflate(v);
  for (int it = 0; it < iterations; ++it) {
    v = llt.solve(M * v);
    deflate(v);
  }
  return v.dot(M * v) / v.dot(S * v);
}

double stabilization_equivalence(const PolyMesh& mesh, CellId c) {
  const Eigen::MatrixXd Q = zero_mean_basis(boundary_mass(mesh, c));
  const Eigen::MatrixXd A = Q.transpose() * edge_stabilization(mesh, c) * Q;
  const Eigen::MatrixXd B = Q.transpose() * face_stabilization(mesh, c) * Q;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
  return ges.eigenvalues()[0];
}

} // namespace anivem
