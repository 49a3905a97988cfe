#pragma once

#include "svi/oracle.hpp"
#include "svi/problem.hpp"

namespace svi {

// Signed weak-Minty parameter of the plane rotation: -cos(theta) / L.
double rotation_rho(double L, double theta);
// Inverse map: the angle in [pi/2, pi] whose rotation has parameter rho >= 0.
double rotation_theta_for_rho(double L, double rho);

// F(x) = L * R(theta) x in the plane, r = 0. The stored rho is max(0, rotation_rho).
ProblemInstance make_rotation(double L, double theta);

// G(x, y) = (b x + a y, -a x + b y) with a = sqrt(L^2 - L^4 rho^2), b = L^2 rho.
ProblemInstance make_quadratic(double L, double rho);
struct QuadraticCoefficients {
  double a;
  double b;
};
QuadraticCoefficients quadratic_coefficients(double L, double rho);

// G(x, y) = (C y, -C^T x) with both blocks in [-w, w].
ProblemInstance make_bilinear_box(const Matrix& coupling, double box_halfwidth);

}  // namespace svi
