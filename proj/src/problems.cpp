#include "svi/problems.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "svi/errors.hpp"

namespace svi {

double rotation_rho(double L, double theta) {
  if (!(L > 0.0)) throw InvalidArgument("rotation requires L > 0");
  return -std::cos(theta) / L;
}

double rotation_theta_for_rho(double L, double rho) {
  if (!(L > 0.0)) throw InvalidArgument("rotation requires L > 0");
  if (!(rho >= 0.0) || rho * L > 1.0) throw InvalidArgument("rotation rho must lie in [0, 1/L]");
  return std::acos(-rho * L);
}

ProblemInstance make_rotation(double L, double theta) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("rotation requires L > 0");
  if (!(theta > 0.0) || theta > std::numbers::pi) throw InvalidArgument("rotation angle must lie in (0, pi]");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Matrix A(2, 2);
  A << L * c, -L * s, L * s, L * c;
  return ProblemInstance("rotation", std::move(A), Regularizer::zero(2), L,
                         std::max(0.0, rotation_rho(L, theta)), Vector::Zero(2));
}

QuadraticCoefficients quadratic_coefficients(double L, double rho) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("quadratic requires L > 0");
  if (!(rho >= 0.0)) throw InvalidArgument("quadratic requires rho >= 0");
  if (rho * L >= 1.0) throw InvalidArgument("quadratic requires rho < 1/L");
  return {std::sqrt(L * L - L * L * L * L * rho * rho), L * L * rho};
}

ProblemInstance make_quadratic(double L, double rho) {
  const auto [a, b] = quadratic_coefficients(L, rho);
  Matrix A(2, 2);
  A << b, a, -a, b;
  return ProblemInstance("quadratic", std::move(A), Regularizer::zero(2), L, rho, Vector::Zero(2));
}

ProblemInstance make_bilinear_box(const Matrix& coupling, double box_halfwidth) {
  if (!(box_halfwidth > 0.0)) throw InvalidArgument("box halfwidth must be > 0");
  if (coupling.size() == 0) throw InvalidArgument("coupling matrix is empty");
  const Eigen::Index n = coupling.rows();
  const Eigen::Index m = coupling.cols();
  Matrix A = Matrix::Zero(n + m, n + m);
  A.topRightCorner(n, m) = coupling;
  A.bottomLeftCorner(m, n) = -coupling.transpose();
  const double L = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
  if (!(L > 0.0)) throw InvalidArgument("coupling matrix must be nonzero");
  const int dim = static_cast<int>(n + m);
  return ProblemInstance("bilinear_box", std::move(A),
                         Regularizer::box(dim, -box_halfwidth, box_halfwidth), L, 0.0,
                         Vector::Zero(dim));
}

}  // namespace svi
