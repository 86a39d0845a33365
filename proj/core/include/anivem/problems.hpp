#pragma once

#include "anivem/meshgen.hpp"
#include "anivem/quadrature.hpp"

namespace anivem {

/// -div(beta grad u) = f with Dirichlet data from the exact solution (or zero).
struct Problem {
  std::string name;
  double beta_minus = 1, beta_plus = 1;
  SidedFunction source;
  SidedFunction exact;  // evaluated with the side of the discrete material
  std::function<Vec3(const Vec3&, Side)> exact_gradient;
  std::function<Side(const Vec3&)> side = [](const Vec3&) { return Side::plus; };

  double beta(Side s) const { return s == Side::minus ? beta_minus : beta_plus; }
  bool has_exact() const { return static_cast<bool>(exact); }
  /// Boundary data: exact solution on its true side, zero without an exact solution.
  double dirichlet(const Vec3& x) const { return exact ? exact(x, side(x)) : 0.0; }
};

/// u = sin(pi x) sin(pi y) sin(pi z), beta = 1.
Problem smooth_problem();
/// u = 1 + 2x - y + 3z with constant beta and no load.
Problem linear_patch_problem(double beta = 1);
/// Global immersed function across a plane: continuous, flux-continuous, piecewise linear.
Problem ife_patch_problem(const Plane& plane, double beta_minus, double beta_plus);
/// Ball of radius r0: u^- = r^3/beta^-, u^+ = (r^3 - r0^3)/beta^+ + r0^3/beta^-, f = -12 r.
Problem sphere_problem(const Vec3& center, double r0, double beta_minus, double beta_plus);

} // namespace anivem
