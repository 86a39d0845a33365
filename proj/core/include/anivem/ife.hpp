#pragma once

#include "anivem/mesh.hpp"

namespace anivem {

/// Matrices carrying constant gradients across a planar interface: grad v^- = minus * grad v^+,
/// with tangential continuity and beta^- d_n v^- = beta^+ d_n v^+.
struct JumpMatrices {
  Mat3 minus;
  Mat3 plus;  // inverse of minus
};

/// Throws GeometryError if {t1, t2, n} is not orthonormal to 1e-10.
Mat3 build_M_minus(const Vec3& t1, const Vec3& t2, const Vec3& n, double beta_minus, double beta_plus);
JumpMatrices jump_matrices(const Vec3& t1, const Vec3& t2, const Vec3& n, double beta_minus, double beta_plus);

/// Four-dimensional space onto which traces are projected: constants plus three functions
/// w_a(x) = g_a . (x - anchor) with side-dependent gradients g_a. For the linear space the
/// gradients are the unit vectors on both sides; for the immersed space g_a^+ = e_a and
/// g_a^- = M^- e_a, so each w_a is continuous with continuous flux across the plane.
struct ProjectionSpace {
  Vec3 anchor = Vec3::Zero();
  std::optional<InterfacePlane> plane;
  Mat3 grad_minus = Mat3::Identity();  // columns are gradients
  Mat3 grad_plus = Mat3::Identity();
  double beta_minus = 1, beta_plus = 1;

  static ProjectionSpace linear(const Vec3& anchor, double beta);
  static ProjectionSpace immersed(const InterfacePlane& plane, double beta_minus, double beta_plus);

  bool is_immersed() const { return plane.has_value(); }
  Side side_of(const Vec3& x) const { return plane ? plane->side_of(x) : Side::plus; }
  double beta(Side s) const { return s == Side::minus ? beta_minus : beta_plus; }
  const Mat3& gradients(Side s) const { return s == Side::minus ? grad_minus : grad_plus; }
  /// [1, w_1, w_2, w_3] at x on the given side.
  Vec4 values(const Vec3& x, Side s) const;
  Vec4 values(const Vec3& x) const { return values(x, side_of(x)); }
  double eval(const Vec4& coeffs, const Vec3& x, Side s) const { return coeffs.dot(values(x, s)); }
  Vec3 gradient(const Vec4& coeffs, Side s) const { return gradients(s) * coeffs.tail<3>(); }
};

} // namespace anivem
