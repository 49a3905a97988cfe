#include "svi/regularizer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "svi/errors.hpp"

namespace svi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dimension(int dimension) {
  if (dimension < 1) throw InvalidArgument("regularizer dimension must be >= 1");
}

}  // namespace

Regularizer Regularizer::zero(int dimension) {
  require_dimension(dimension);
  return Regularizer(RegularizerKind::kZero, dimension);
}

Regularizer Regularizer::box(Vector lower, Vector upper) {
  require_dimension(static_cast<int>(lower.size()));
  if (lower.size() != upper.size()) throw InvalidArgument("box bounds differ in length");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
      throw InvalidArgument("box requires lower <= upper (component " + std::to_string(i) + ")");
    }
  }
  Regularizer r(RegularizerKind::kBox, static_cast<int>(lower.size()));
  r.lower_ = std::move(lower);
  r.upper_ = std::move(upper);
  return r;
}

Regularizer Regularizer::box(int dimension, double lower, double upper) {
  require_dimension(dimension);
  return box(Vector::Constant(dimension, lower), Vector::Constant(dimension, upper));
}

Regularizer Regularizer::nonnegative_orthant(int dimension) {
  require_dimension(dimension);
  Regularizer r(RegularizerKind::kNonnegativeOrthant, dimension);
  r.lower_ = Vector::Zero(dimension);
  r.upper_ = Vector::Constant(dimension, kInf);
  return r;
}

Regularizer Regularizer::l1(int dimension, double weight) {
  require_dimension(dimension);
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw InvalidArgument("l1 weight must be >= 0");
  Regularizer r(RegularizerKind::kL1, dimension);
  r.weight_ = weight;
  return r;
}

Regularizer Regularizer::ball(int dimension, double radius) {
  require_dimension(dimension);
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("ball radius must be > 0");
  Regularizer r(RegularizerKind::kBall, dimension);
  r.radius_ = radius;
  return r;
}

void Regularizer::check(const Vector& x) const {
  if (x.size() != dimension_) {
    throw InvalidArgument("dimension mismatch: regularizer has " + std::to_string(dimension_) +
                          ", vector has " + std::to_string(x.size()));
  }
}

Vector Regularizer::prox(double gamma, const Vector& x) const {
  Vector out(x.size());
  prox_into(gamma, x, out);
  return out;
}

void Regularizer::prox_into(double gamma, const Vector& x, Vector& out) const {
  check(x);
  if (!(gamma > 0.0)) throw InvalidArgument("prox step gamma must be > 0");
  if (&out != &x) out.resize(x.size());
  switch (kind_) {
    case RegularizerKind::kZero:
      if (&out != &x) out = x;
      return;
    case RegularizerKind::kBox:
    case RegularizerKind::kNonnegativeOrthant:
      out = x.cwiseMax(lower_).cwiseMin(upper_);
      return;
    case RegularizerKind::kL1: {
      const double t = gamma * weight_;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double mag = std::abs(xi) - t;
        out[i] = mag > 0.0 ? std::copysign(mag, xi) : 0.0;
      }
      return;
    }
    case RegularizerKind::kBall: {
      const double n = x.norm();
      if (n > radius_) {
        out = x * (radius_ / n);
        // Rounding can leave the result a few ulps outside; shrink until it is inside.
        while (out.norm() > radius_) out *= std::nextafter(1.0, 0.0);
      } else if (&out != &x) {
        out = x;
      }
      return;
    }
  }
}

double Regularizer::value(const Vector& x) const {
  check(x);
  switch (kind_) {
    case RegularizerKind::kZero:
      return 0.0;
    case RegularizerKind::kL1:
      return weight_ * x.lpNorm<1>();
    default:
      return contains(x) ? 0.0 : kInf;
  }
}

bool Regularizer::contains(const Vector& x, double tol) const {
  check(x);
  switch (kind_) {
    case RegularizerKind::kZero:
    case RegularizerKind::kL1:
      return x.allFinite();
    case RegularizerKind::kBox:
    case RegularizerKind::kNonnegativeOrthant:
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
      }
      return true;
    case RegularizerKind::kBall:
      return x.norm() <= radius_ + tol;
  }
  return false;
}

bool Regularizer::in_subdifferential(const Vector& p, const Vector& v, double tol) const {
  check(p);
  check(v);
  if (!contains(p, tol)) return false;
  switch (kind_) {
    case RegularizerKind::kZero:
      return v.lpNorm<Eigen::Infinity>() <= tol;
    case RegularizerKind::kBox:
    case RegularizerKind::kNonnegativeOrthant:
      // Normal cone of a box: componentwise sign conditions at active bounds.
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        const bool at_lower = std::abs(p[i] - lower_[i]) <= tol;
        const bool at_upper = std::abs(p[i] - upper_[i]) <= tol;
        if (at_lower && at_upper) continue;
        if (at_lower) {
          if (v[i] > tol) return false;
        } else if (at_upper) {
          if (v[i] < -tol) return false;
        } else if (std::abs(v[i]) > tol) {
          return false;
        }
      }
      return true;
    case RegularizerKind::kL1:
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (std::abs(p[i]) <= tol) {
          if (std::abs(v[i]) > weight_ + tol) return false;
        } else if (std::abs(v[i] - std::copysign(weight_, p[i])) > tol) {
          return false;
        }
      }
      return true;
    case RegularizerKind::kBall: {
      const double n = p.norm();
      if (n < radius_ - tol) return v.lpNorm<Eigen::Infinity>() <= tol;
      // On the sphere the normal cone is the ray through p.
      const double along = v.dot(p) / (n * n);
      return along >= -tol && (v - along * p).lpNorm<Eigen::Infinity>() <= tol;
    }
  }
  return false;
}

}  // namespace svi
