#pragma once

#include "svi/problem.hpp"
#include "svi/types.hpp"

namespace svi {

// Step used when a solver logs residuals: 1 / (4 L).
double default_residual_gamma(const ProblemInstance& problem) noexcept;

// ||G(z)|| when r = 0, else the natural residual ||z - prox_{gamma r}(z - gamma G(z))|| / gamma.
double residual(const ProblemInstance& problem, const Vector& z, double gamma);
double residual(const ProblemInstance& problem, const Vector& z);

// Norm of the explicit element (z_base - z_half)/gamma - g_used + G(z_half) of (G + dr)(z_half).
// Requires z_half = prox_{gamma r}(z_base - gamma g_used); throws ContractError otherwise.
double fbf_certificate(const ProblemInstance& problem, const Vector& z_base, const Vector& z_half,
                       double gamma, const Vector& g_used);

}  // namespace svi
