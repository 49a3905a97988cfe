#include "svi/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace svi {

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(base);
  for (std::uint64_t tag : path) h = mix64(h ^ mix64(tag + 0x2545f4914f6cdd1dULL));
  return h;
}

double CounterRng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

double CounterRng::laplace(double scale) noexcept {
  const double u = uniform() - 0.5;
  return -scale * std::copysign(std::log1p(-2.0 * std::abs(u)), u);
}

double CounterRng::student_t(int nu) noexcept {
  const double z = normal();
  double chi2 = 0.0;
  for (int i = 0; i < nu; ++i) {
    const double g = normal();
    chi2 += g * g;
  }
  return z / std::sqrt(chi2 / nu);
}

int CounterRng::geometric_half() noexcept {
  std::uint64_t word = next_u64();
  int level = 1;
  while (word == 0) {  // probability 2^-64 per word
    level += 64;
    word = next_u64();
  }
  return level + std::countr_zero(word);
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace svi
