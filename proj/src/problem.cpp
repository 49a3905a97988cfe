#include "svi/problem.hpp"

#include <algorithm>
#include <cmath>

#include "svi/errors.hpp"

namespace svi {

ProblemInstance::ProblemInstance(std::string name, Matrix linear_map, Regularizer regularizer,
                                 double lipschitz, double rho, std::optional<Vector> known_solution)
    : name_(std::move(name)),
      dimension_(static_cast<int>(linear_map.rows())),
      linear_map_(std::move(linear_map)),
      regularizer_(std::move(regularizer)),
      lipschitz_(lipschitz),
      rho_(rho),
      known_solution_(std::move(known_solution)) {
  if (linear_map_->rows() != linear_map_->cols()) throw InvalidArgument("operator matrix must be square");
  validate();
}

ProblemInstance::ProblemInstance(std::string name, int dimension, OperatorFn op,
                                 Regularizer regularizer, double lipschitz, double rho,
                                 std::optional<Vector> known_solution)
    : name_(std::move(name)),
      dimension_(dimension),
      op_(std::move(op)),
      regularizer_(std::move(regularizer)),
      lipschitz_(lipschitz),
      rho_(rho),
      known_solution_(std::move(known_solution)) {
  if (!op_) throw InvalidArgument("operator callback is empty");
  validate();
}

void ProblemInstance::validate() {
  if (dimension_ < 1) throw InvalidArgument("problem dimension must be >= 1");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_)) throw InvalidArgument("lipschitz constant must be > 0");
  if (!(rho_ >= 0.0) || !std::isfinite(rho_)) throw InvalidArgument("rho must be >= 0");
  if (regularizer_.dimension() != dimension_) throw InvalidArgument("regularizer dimension mismatch");
  if (known_solution_) {
    check_dimension(*known_solution_, "known solution");
    if (regularizer_.is_zero()) {
      const double g = (*this)(*known_solution_).norm();
      if (g > 1e-9 * std::max(1.0, known_solution_->norm())) {
        throw InvalidArgument("known solution does not satisfy G(z*) = 0");
      }
    }
  }
}

void ProblemInstance::check_dimension(const Vector& z, const char* what) const {
  if (z.size() != dimension_) {
    throw InvalidArgument(std::string(what) + " has dimension " + std::to_string(z.size()) +
                          ", problem has " + std::to_string(dimension_));
  }
}

void ProblemInstance::apply(const Vector& z, Vector& out) const {
  check_dimension(z);
  out.resize(dimension_);
  if (linear_map_) {
    out.noalias() = *linear_map_ * z;
  } else {
    op_(z, out);
  }
}

Vector ProblemInstance::operator()(const Vector& z) const {
  Vector out(dimension_);
  apply(z, out);
  return out;
}

}  // namespace svi
