#include "anivem/problems.hpp"

#include "anivem/ife.hpp"

#include <cmath>
#include <numbers>

namespace anivem {

using std::numbers::pi;

Problem smooth_problem() {
  Problem p;
  p.name = "smooth";
  p.exact = [](const Vec3& x, Side) { return std::sin(pi * x.x()) * std::sin(pi * x.y()) * std::sin(pi * x.z()); };
  p.exact_gradient = [](const Vec3& x, Side) {
    const double sx = std::sin(pi * x.x()), sy = std::sin(pi * x.y()), sz = std::sin(pi * x.z());
    const double cx = std::cos(pi * x.x()), cy = std::cos(pi * x.y()), cz = std::cos(pi * x.z());
    return Vec3(pi * cx * sy * sz, pi * sx * cy * sz, pi * sx * sy * cz);
  };
  p.source = [e = p.exact](const Vec3& x, Side s) { return 3 * pi * pi * e(x, s); };
  return p;
}

Problem linear_patch_problem(double beta) {
  Problem p;
  p.name = "patch-linear";
  p.beta_minus = p.beta_plus = beta;
  const Vec3 g(2, -1, 3);
  p.exact = [g](const Vec3& x, Side) { return 1 + g.dot(x); };
  p.exact_gradient = [g](const Vec3&, Side) { return g; };
  p.source = [](const Vec3&, Side) { return 0.0; };
  return p;
}

Problem ife_patch_problem(const Plane& plane, double beta_minus, double beta_plus) {
  Problem p;
  p.name = "patch-ife";
  p.beta_minus = beta_minus;
  p.beta_plus = beta_plus;
  const Vec3 n = plane.normal;
  Vec3 t1 = Vec3::UnitX() - n.x() * n;
  if (t1.norm() < 1e-6) t1 = Vec3::UnitY() - n.y() * n;
  t1.normalize();
  const Vec3 t2 = n.cross(t1);
  const Vec3 gp(1.0, -2.0, 0.5);
  const Vec3 gm = build_M_minus(t1, t2, n, beta_minus, beta_plus) * gp;
  const Vec3 x0 = plane.offset * n;
  p.exact = [=](const Vec3& x, Side s) { return 0.7 + (s == Side::minus ? gm : gp).dot(x - x0); };
  p.exact_gradient = [=](const Vec3&, Side s) { return s == Side::minus ? gm : gp; };
  p.source = [](const Vec3&, Side) { return 0.0; };
  p.side = [=](const Vec3& x) { return n.dot(x) - plane.offset < 0 ? Side::minus : Side::plus; };
  return p;
}

Problem sphere_problem(const Vec3& center, double r0, double beta_minus, double beta_plus) {
  Problem p;
  p.name = "sphere-interface";
  p.beta_minus = beta_minus;
  p.beta_plus = beta_plus;
  const double r03 = r0 * r0 * r0;
  p.exact = [=](const Vec3& x, Side s) {
    const double r = (x - center).norm(), r3 = r * r * r;
    return s == Side::minus ? r3 / beta_minus : (r3 - r03) / beta_plus + r03 / beta_minus;
  };
  p.exact_gradient = [=](const Vec3& x, Side s) {
    const Vec3 d = x - center;
    return Vec3(3 * d.norm() * d / (s == Side::minus ? beta_minus : beta_plus));
  };
  p.source = [=](const Vec3& x, Side) { return -12 * (x - center).norm(); };
  p.side = [=](const Vec3& x) { return (x - center).norm() < r0 ? Side::minus : Side::plus; };
  return p;
}

} // namespace anivem
