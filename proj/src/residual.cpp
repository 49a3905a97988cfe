#include "svi/residual.hpp"

#include <algorithm>

#include "svi/errors.hpp"

namespace svi {

double default_residual_gamma(const ProblemInstance& problem) noexcept {
  return 0.25 / problem.lipschitz();
}

double residual(const ProblemInstance& problem, const Vector& z, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("residual step gamma must be > 0");
  const Vector g = problem(z);
  if (problem.regularizer().is_zero()) return g.norm();
  const Vector p = problem.regularizer().prox(gamma, z - gamma * g);
  return (z - p).norm() / gamma;
}

double residual(const ProblemInstance& problem, const Vector& z) {
  return residual(problem, z, default_residual_gamma(problem));
}

double fbf_certificate(const ProblemInstance& problem, const Vector& z_base, const Vector& z_half,
                       double gamma, const Vector& g_used) {
  if (!(gamma > 0.0)) throw InvalidArgument("certificate step gamma must be > 0");
  problem.check_dimension(z_base, "z_base");
  problem.check_dimension(z_half, "z_half");
  problem.check_dimension(g_used, "g_used");
  const Vector expected = problem.regularizer().prox(gamma, z_base - gamma * g_used);
  const double scale = std::max(1.0, z_half.lpNorm<Eigen::Infinity>());
  if ((expected - z_half).lpNorm<Eigen::Infinity>() > 1e-9 * scale) {
    throw ContractError("z_half is not the prox-gradient point of (z_base, g_used)");
  }
  return ((z_base - z_half) / gamma - g_used + problem(z_half)).norm();
}

}  // namespace svi
