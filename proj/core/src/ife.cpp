#include "anivem/ife.hpp"

namespace anivem {

Mat3 build_M_minus(const Vec3& t1, const Vec3& t2, const Vec3& n, double beta_minus, double beta_plus) {
  if (!(beta_minus > 0 && beta_plus > 0)) throw GeometryError("coefficients must be positive");
  Mat3 F;
  F << t1, t2, n;
  if (!((F.transpose() * F - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-10))
    throw GeometryError("interface frame is not orthonormal");
  // [t1,t2,beta^- n]^{-T} = [t1,t2,n/beta^-] for an orthonormal frame, so the product keeps
  // tangents and scales the normal by beta^+/beta^-
  return Mat3::Identity() + (beta_plus / beta_minus - 1) * n * n.transpose();
}

JumpMatrices jump_matrices(const Vec3& t1, const Vec3& t2, const Vec3& n, double beta_minus, double beta_plus) {
  JumpMatrices J;
  J.minus = build_M_minus(t1, t2, n, beta_minus, beta_plus);
  J.plus = build_M_minus(t1, t2, n, beta_plus, beta_minus);
  return J;
}

ProjectionSpace ProjectionSpace::linear(const Vec3& anchor, double beta) {
  ProjectionSpace s;
  s.anchor = anchor;
  s.beta_minus = s.beta_plus = beta;
  return s;
}

ProjectionSpace ProjectionSpace::immersed(const InterfacePlane& plane, double beta_minus, double beta_plus) {
  ProjectionSpace s;
  s.anchor = plane.anchor;
  s.plane = plane;
  s.beta_minus = beta_minus;
  s.beta_plus = beta_plus;
  s.grad_plus = Mat3::Identity();
  s.grad_minus = build_M_minus(plane.t1, plane.t2, plane.normal, beta_minus, beta_plus);
  return s;
}

Vec4 ProjectionSpace::values(const Vec3& x, Side s) const {
  Vec4 v;
  v[0] = 1;
  v.tail<3>() = gradients(s).transpose() * (x - anchor);
  return v;
}

} // namespace anivem
