#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "svi/problem.hpp"
#include "svi/rng.hpp"
#include "svi/types.hpp"

namespace svi {

enum class NoiseModel { kNone, kGaussian, kStudentT, kLaplace, kMultiplicative };

const char* to_string(NoiseModel model) noexcept;

struct NoiseSpec {
  NoiseModel model = NoiseModel::kNone;
  // gaussian: per-component std; laplace: per-component scale b; student_t: multiplier of t_nu.
  double scale = 0.0;
  int nu = 2;
  // multiplicative only
  double bound_B = 0.0;
  double sigma = 0.0;
  std::optional<Vector> anchor;

  static NoiseSpec none() { return {}; }
  static NoiseSpec gaussian(double stddev);
  static NoiseSpec student_t(double scale, int nu = 2);
  static NoiseSpec laplace(double scale);
  static NoiseSpec multiplicative(double B, double sigma, std::optional<Vector> anchor = std::nullopt);
};

// Unbiased sampler G~(z, xi) keyed by a 64-bit seed. The realization xi depends only
// on the seed, so two evaluations with one seed share it exactly.
class StochasticOracle {
 public:
  StochasticOracle(ProblemInstance problem, NoiseSpec spec);

  const ProblemInstance& problem() const noexcept { return problem_; }
  int dimension() const noexcept { return problem_.dimension(); }
  NoiseModel noise_model() const noexcept { return spec_.model; }
  const NoiseSpec& noise_spec() const noexcept { return spec_; }

  // Constants of E||G~(z) - G(z)||^2 <= B^2 ||z - z0||^2 + sigma^2.
  double sigma() const noexcept { return sigma_; }
  double bound_B() const noexcept { return bound_B_; }
  const Vector& anchor() const noexcept { return anchor_; }
  bool variance_certified() const noexcept { return variance_certified_; }
  // Constant c with E||G~(x) - G~(y)||^2 <= c ||x - y||^2 under a shared seed.
  std::optional<double> expected_lipschitz() const noexcept { return expected_lipschitz_; }

  bool multi_point() const noexcept { return multi_point_; }
  // Copy that refuses shared-seed evaluation.
  StochasticOracle single_point() const;

  Vector sample(const Vector& z, std::uint64_t seed) const;
  void sample_into(const Vector& z, std::uint64_t seed, Vector& out) const;

  std::pair<Vector, Vector> sample_pair(const Vector& z1, const Vector& z2, std::uint64_t seed) const;
  void sample_pair_into(const Vector& z1, const Vector& z2, std::uint64_t seed, Vector& out1,
                        Vector& out2) const;

  // Mean of `batch` samples at seeds stream.next(), ..., in order.
  Vector minibatch(const Vector& z, std::uint64_t batch, SeedStream& stream) const;
  void minibatch_into(const Vector& z, std::uint64_t batch, SeedStream& stream, Vector& out,
                      Vector& scratch) const;

 private:
  // Adds one noise realization at z to `acc`.
  void add_noise(const Vector& z, CounterRng& rng, Vector& acc) const;

  ProblemInstance problem_;
  NoiseSpec spec_;
  double sigma_ = 0.0;
  double bound_B_ = 0.0;
  Vector anchor_;
  bool variance_certified_ = true;
  std::optional<double> expected_lipschitz_;
  bool multi_point_ = true;
};

StochasticOracle attach_noise(ProblemInstance problem, NoiseSpec spec);

// Per-run wrapper that counts every oracle evaluation (deterministic ones included).
class CountingOracle {
 public:
  explicit CountingOracle(const StochasticOracle& oracle) noexcept : oracle_(&oracle) {}

  const StochasticOracle& oracle() const noexcept { return *oracle_; }
  const ProblemInstance& problem() const noexcept { return oracle_->problem(); }
  std::uint64_t calls() const noexcept { return calls_; }

  void evaluate_into(const Vector& z, Vector& out) {
    ++calls_;
    oracle_->problem().apply(z, out);
  }
  void sample_into(const Vector& z, std::uint64_t seed, Vector& out) {
    ++calls_;
    oracle_->sample_into(z, seed, out);
  }
  void sample_pair_into(const Vector& z1, const Vector& z2, std::uint64_t seed, Vector& out1, Vector& out2) {
    oracle_->sample_pair_into(z1, z2, seed, out1, out2);
    calls_ += 2;
  }
  void minibatch_into(const Vector& z, std::uint64_t batch, SeedStream& stream, Vector& out, Vector& scratch) {
    oracle_->minibatch_into(z, batch, stream, out, scratch);
    calls_ += batch;
  }

 private:
  const StochasticOracle* oracle_;
  std::uint64_t calls_ = 0;
};

}  // namespace svi
