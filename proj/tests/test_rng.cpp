#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "svi/rng.hpp"

using svi::CounterRng;
using svi::SeedStream;
using svi::derive_seed;

TEST_CASE("counter generator is a pure function of its key") {
  CounterRng a(42), b(42), c(43);
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    any_diff |= x != c.next_u64();
  }
  CHECK(any_diff);
}

TEST_CASE("uniform draws stay in the open unit interval") {
  CounterRng r(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws have zero mean and unit variance") {
  CounterRng r(11);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.015));
}

TEST_CASE("laplace variance is twice the squared scale") {
  CounterRng r(5);
  const int n = 200000;
  const double b = 0.7;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.laplace(b);
    s2 += x * x;
  }
  CHECK(s2 / n == doctest::Approx(2.0 * b * b).epsilon(0.03));
}

TEST_CASE("student t with two degrees of freedom has the right median spread") {
  // For nu = 2, P(|T| <= t) = t / sqrt(t^2 + 2); at t = sqrt(2/3) this is 1/2.
  CounterRng r(9);
  const int n = 100000;
  int inside = 0;
  for (int i = 0; i < n; ++i) inside += std::abs(r.student_t(2)) <= std::sqrt(2.0 / 3.0);
  CHECK(static_cast<double>(inside) / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("geometric levels follow P(I = i) = 2^-i") {
  CounterRng r(2024);
  const int n = 1000000;
  std::vector<int> counts(64, 0);
  for (int i = 0; i < n; ++i) {
    const int level = r.geometric_half();
    REQUIRE(level >= 1);
    if (level < 64) ++counts[level];
  }
  for (int i = 1; i <= 10; ++i) {
    const double p = std::ldexp(1.0, -i);
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(counts[i] / static_cast<double>(n) - p) <= 3.0 * se);
  }
}

TEST_CASE("bounded integers are uniform") {
  CounterRng r(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) CHECK(c == doctest::Approx(10000).epsilon(0.05));
  CHECK(r.below(1) == 0);
}

TEST_CASE("seed derivation separates paths") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(1, {a, b}));
  }
  CHECK(seen.size() == 400);
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
}

TEST_CASE("seed streams are reproducible and forks are independent") {
  SeedStream s(99), t(99);
  CHECK(s.next() == t.next());
  CHECK(s.next() == t.next());
  CHECK(s.drawn() == 2);
  SeedStream f1 = s.fork(1), f2 = s.fork(2);
  CHECK(f1.next() != f2.next());
  CHECK(s.fork(1).base() == f1.base());
}
