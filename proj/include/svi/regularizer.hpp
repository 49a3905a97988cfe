#pragma once

#include "svi/types.hpp"

namespace svi {

enum class RegularizerKind { kZero, kBox, kNonnegativeOrthant, kL1, kBall };

// Closed convex r with an exact proximal map. Box bounds may be infinite,
// which also covers block-wise constraints such as a nonnegative dual block.
class Regularizer {
 public:
  static Regularizer zero(int dimension);
  static Regularizer box(Vector lower, Vector upper);
  static Regularizer box(int dimension, double lower, double upper);
  static Regularizer nonnegative_orthant(int dimension);
  static Regularizer l1(int dimension, double weight);
  static Regularizer ball(int dimension, double radius);

  RegularizerKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dimension_; }
  bool is_zero() const noexcept { return kind_ == RegularizerKind::kZero; }
  bool is_indicator() const noexcept {
    return kind_ == RegularizerKind::kBox || kind_ == RegularizerKind::kNonnegativeOrthant ||
           kind_ == RegularizerKind::kBall;
  }

  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  double weight() const noexcept { return weight_; }
  double radius() const noexcept { return radius_; }

  // argmin_u r(u) + ||u - x||^2 / (2 gamma)
  Vector prox(double gamma, const Vector& x) const;
  // Same, written into `out`; `out` may alias `x`.
  void prox_into(double gamma, const Vector& x, Vector& out) const;

  // r(x); +inf outside the domain of an indicator.
  double value(const Vector& x) const;
  bool contains(const Vector& x, double tol = 0.0) const;
  // Whether v lies in the subdifferential of r at p, up to `tol`.
  bool in_subdifferential(const Vector& p, const Vector& v, double tol = 1e-9) const;

 private:
  Regularizer(RegularizerKind kind, int dimension) : kind_(kind), dimension_(dimension) {}
  void check(const Vector& x) const;

  RegularizerKind kind_;
  int dimension_;
  Vector lower_;
  Vector upper_;
  double weight_ = 0.0;
  double radius_ = 0.0;
};

}  // namespace svi
