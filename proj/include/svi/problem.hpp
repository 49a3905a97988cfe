#pragma once

#include <functional>
#include <optional>
#include <string>

#include "svi/regularizer.hpp"
#include "svi/types.hpp"

namespace svi {

// Monotone-inclusion instance 0 in (G + dr)(z) with G L-Lipschitz and weak-Minty parameter rho.
// Immutable after construction.
class ProblemInstance {
 public:
  using OperatorFn = std::function<void(const Vector&, Vector&)>;

  // Linear operator G(z) = A z.
  ProblemInstance(std::string name, Matrix linear_map, Regularizer regularizer, double lipschitz,
                  double rho, std::optional<Vector> known_solution = std::nullopt);
  // General operator; `op(z, out)` must write G(z) into a vector of the problem dimension.
  ProblemInstance(std::string name, int dimension, OperatorFn op, Regularizer regularizer,
                  double lipschitz, double rho, std::optional<Vector> known_solution = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  int dimension() const noexcept { return dimension_; }
  double lipschitz() const noexcept { return lipschitz_; }
  double rho() const noexcept { return rho_; }
  const Regularizer& regularizer() const noexcept { return regularizer_; }
  const std::optional<Vector>& known_solution() const noexcept { return known_solution_; }
  const std::optional<Matrix>& linear_map() const noexcept { return linear_map_; }

  // out = G(z); `out` must not alias `z`.
  void apply(const Vector& z, Vector& out) const;
  Vector operator()(const Vector& z) const;

  void check_dimension(const Vector& z, const char* what = "point") const;

 private:
  void validate();

  std::string name_;
  int dimension_;
  std::optional<Matrix> linear_map_;
  OperatorFn op_;
  Regularizer regularizer_;
  double lipschitz_;
  double rho_;
  std::optional<Vector> known_solution_;
};

}  // namespace svi
