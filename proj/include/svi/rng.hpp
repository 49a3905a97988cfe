#pragma once

#include <cstdint>
#include <initializer_list>

namespace svi {

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hashes a base seed together with a path of tags (iteration, role, draw index...).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

// Counter-based generator: the n-th output is mix64(key + n * golden), so a
// stream is fully determined by its key and can be recreated anywhere.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(mix64(key ^ 0x5851f42d4c957f2dULL)) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() noexcept;
  double laplace(double scale) noexcept;
  // Student-t via Z / sqrt(chi2_nu / nu); nu must be a positive integer.
  double student_t(int nu) noexcept;
  // Returns i >= 1 with probability 2^{-i}.
  int geometric_half() noexcept;
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Hands out fresh seeds one after another; fork() opens an independent child stream.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t base) noexcept : base_(base) {}

  std::uint64_t next() noexcept { return derive_seed(base_, {counter_++}); }
  SeedStream fork(std::uint64_t tag) const noexcept {
    return SeedStream(derive_seed(base_, {0xf0f0f0f0ULL, tag}));
  }
  std::uint64_t base() const noexcept { return base_; }
  std::uint64_t drawn() const noexcept { return counter_; }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace svi
