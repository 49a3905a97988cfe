#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "svi/errors.hpp"
#include "svi/regularizer.hpp"
#include "svi/rng.hpp"

using svi::Regularizer;
using svi::Vector;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vector random_vector(svi::CounterRng& r, int n, double scale) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * r.normal();
  return v;
}

std::vector<Regularizer> all_kinds(int n) {
  const double inf = std::numeric_limits<double>::infinity();
  Vector lo = Vector::Constant(n, -1.0), hi = Vector::Constant(n, 1.0);
  lo[0] = -inf;  // half-open component
  return {Regularizer::zero(n),       Regularizer::box(lo, hi),   Regularizer::nonnegative_orthant(n),
          Regularizer::l1(n, 0.4),    Regularizer::ball(n, 1.5)};
}

}  // namespace

TEST_CASE("zero prox is the identity") {
  const Regularizer r = Regularizer::zero(2);
  CHECK(r.prox(0.7, vec({3.2, -1})) == vec({3.2, -1}));
}

TEST_CASE("box prox clamps") {
  const Regularizer r = Regularizer::box(2, -1.0, 1.0);
  CHECK(r.prox(0.5, vec({2, -0.5})) == vec({1, -0.5}));
}

TEST_CASE("l1 prox matches a brute-force grid minimization") {
  const double gamma = 0.3;
  const Regularizer r = Regularizer::l1(2, 1.0);
  const Vector x = vec({0.8, -0.1});
  const Vector p = r.prox(gamma, x);
  for (int i = 0; i < 2; ++i) {
    auto objective = [&](double u) { return std::abs(u) + (u - x[i]) * (u - x[i]) / (2 * gamma); };
    const double u = oracles::grid_argmin(objective, -2.0, 2.0, 1e-4);
    CHECK(std::abs(p[i] - u) <= 2e-4);
  }
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == 0.0);
}

TEST_CASE("l1 prox maps the kink tie exactly to zero") {
  const Regularizer r = Regularizer::l1(1, 2.0);
  CHECK(r.prox(0.25, vec({0.5}))[0] == 0.0);
  CHECK(r.prox(0.25, vec({-0.5}))[0] == 0.0);
}

TEST_CASE("prox is firmly nonexpansive for every kind") {
  svi::CounterRng rng(17);
  for (const auto& r : all_kinds(3)) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector x = random_vector(rng, 3, 2.0), y = random_vector(rng, 3, 2.0);
      const double gamma = 0.05 + rng.uniform();
      const Vector px = r.prox(gamma, x), py = r.prox(gamma, y);
      const Vector d = px - py;
      REQUIRE(d.squaredNorm() <= d.dot(x - y) + 1e-12);
      REQUIRE(d.norm() <= (x - y).norm() + 1e-12);
    }
  }
}

TEST_CASE("prox residual is a subgradient at the prox point") {
  svi::CounterRng rng(23);
  for (const auto& r : all_kinds(3)) {
    for (int trial = 0; trial < 500; ++trial) {
      const Vector x = random_vector(rng, 3, 2.0);
      const double gamma = 0.1 + rng.uniform();
      const Vector p = r.prox(gamma, x);
      REQUIRE(r.in_subdifferential(p, (x - p) / gamma, 1e-9));
    }
  }
}

TEST_CASE("subdifferential test rejects wrong elements") {
  const Regularizer box = Regularizer::box(2, -1.0, 1.0);
  CHECK_FALSE(box.in_subdifferential(vec({1, 0}), vec({-1, 0})));
  CHECK(box.in_subdifferential(vec({1, 0}), vec({3, 0})));
  CHECK_FALSE(box.in_subdifferential(vec({0.5, 0}), vec({0.1, 0})));
  const Regularizer l1 = Regularizer::l1(1, 1.0);
  CHECK(l1.in_subdifferential(vec({0}), vec({0.3})));
  CHECK_FALSE(l1.in_subdifferential(vec({0}), vec({1.3})));
  CHECK_FALSE(l1.in_subdifferential(vec({2}), vec({0.3})));
  const Regularizer ball = Regularizer::ball(2, 1.0);
  CHECK(ball.in_subdifferential(vec({1, 0}), vec({2, 0})));
  CHECK_FALSE(ball.in_subdifferential(vec({1, 0}), vec({2, 1})));
  CHECK_FALSE(ball.in_subdifferential(vec({2, 0}), vec({0, 0})));
}

TEST_CASE("indicator prox ignores the step and is idempotent") {
  svi::CounterRng rng(31);
  for (const auto& r : all_kinds(3)) {
    if (!r.is_indicator()) continue;
    for (int trial = 0; trial < 200; ++trial) {
      const Vector x = random_vector(rng, 3, 3.0);
      const Vector p = r.prox(0.01, x);
      CHECK(r.prox(100.0, x) == p);
      CHECK(r.prox(1.0, p) == p);
      CHECK(r.contains(p));
    }
  }
}

TEST_CASE("prox_into tolerates aliasing") {
  for (const auto& r : all_kinds(3)) {
    Vector x = vec({2.5, -0.3, 4.0});
    const Vector expected = r.prox(0.5, x);
    r.prox_into(0.5, x, x);
    CHECK(x == expected);
  }
}

TEST_CASE("values and membership") {
  const Regularizer l1 = Regularizer::l1(2, 0.5);
  CHECK(l1.value(vec({1, -2})) == doctest::Approx(1.5));
  const Regularizer box = Regularizer::box(2, 0.0, 1.0);
  CHECK(box.value(vec({0.5, 0.5})) == 0.0);
  CHECK(std::isinf(box.value(vec({1.5, 0.5}))));
  const Regularizer orth = Regularizer::nonnegative_orthant(2);
  CHECK(orth.prox(1.0, vec({-1, 2})) == vec({0, 2}));
}

TEST_CASE("infinite box bounds express a dual nonnegativity block") {
  const double inf = std::numeric_limits<double>::infinity();
  const Regularizer r = Regularizer::box(vec({-inf, -inf, 0.0}), vec({inf, inf, inf}));
  CHECK(r.prox(1.0, vec({-5, 7, -2})) == vec({-5, 7, 0}));
}

TEST_CASE("invalid construction and dimension mismatch") {
  CHECK_THROWS_AS(Regularizer::box(vec({1}), vec({0})), svi::InvalidArgument);
  CHECK_THROWS_AS(Regularizer::l1(2, -1.0), svi::InvalidArgument);
  CHECK_THROWS_AS(Regularizer::ball(2, 0.0), svi::InvalidArgument);
  CHECK_THROWS_AS(Regularizer::zero(0), svi::InvalidArgument);
  CHECK_THROWS_AS(Regularizer::zero(2).prox(1.0, vec({1, 2, 3})), svi::InvalidArgument);
  CHECK_THROWS_AS(Regularizer::zero(2).prox(0.0, vec({1, 2})), svi::InvalidArgument);
}
