#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "svi/errors.hpp"
#include "svi/mlmc_km.hpp"

namespace svi::mlmc {

double inner_step(double mu, double M, std::int64_t t) noexcept {
  return 4.0 / ((static_cast<double>(t) + 1.0) * mu + 144.0 * M * M / mu);
}

ResolventSubproblem::ResolventSubproblem(const StochasticOracle& oracle, Vector anchor, double eta,
                                         std::optional<double> initial_step)
    : oracle_(&oracle), anchor_(std::move(anchor)), eta_(eta) {
  const ProblemInstance& p = oracle.problem();
  p.check_dimension(anchor_, "subproblem anchor");
  if (!(eta_ > 0.0)) throw InvalidArgument("eta must be > 0");
  const double L = p.lipschitz();
  mu_ = 1.0 - eta_ * L;
  if (!(mu_ > 0.0)) {
    throw RegimeError("resolvent subproblem needs eta < 1/L for strong monotonicity (mu = " +
                      std::to_string(mu_) + ")");
  }
  lipschitz_B_ = 1.0 + eta_ * L;
  noise_B_ = eta_ * oracle.bound_B();
  noise_sigma_ = eta_ * oracle.sigma();
  M_ = std::max(lipschitz_B_, noise_B_);
  kappa_ = 144.0 * M_ * M_ / (mu_ * mu_);
  if (initial_step) {
    if (!(*initial_step > 0.0)) throw InvalidArgument("inner initial step must be > 0");
    step_scale_ = *initial_step / inner_step(mu_, M_, 0);
  }
}

double ResolventSubproblem::step(std::int64_t t) const noexcept {
  return step_scale_ * inner_step(mu_, M_, t);
}

void ResolventSubproblem::apply(const Vector& x, Vector& out) const {
  oracle_->problem().apply(x, out);
  out = x + eta_ * out - anchor_;
}

void ResolventSubproblem::sample_into(const Vector& x, std::uint64_t seed, CountingOracle& counter,
                                      Vector& out) const {
  counter.sample_into(x, seed, out);
  out = x + eta_ * out - anchor_;
}

void ResolventSubproblem::prox_into(double tau, const Vector& x, Vector& out) const {
  oracle_->problem().regularizer().prox_into(tau * eta_, x, out);
}

double ResolventSubproblem::rate_constant(double dist0_sq) const noexcept {
  return 3.0 * kappa_ * dist0_sq + 282.0 * noise_sigma_ * noise_sigma_ / (mu_ * mu_);
}

double ResolventSubproblem::rate_bound(double dist0_sq, std::int64_t T) const noexcept {
  return rate_constant(dist0_sq) / (static_cast<double>(T) + kappa_);
}

InnerTrajectory inner_fbf(const ResolventSubproblem& sub, const Vector& x0, std::int64_t T,
                          SeedStream& seeds, CountingOracle& counter, TrajectoryRecording recording) {
  if (T < 1) throw InvalidArgument("inner iteration count must be >= 1");
  sub.oracle().problem().check_dimension(x0, "inner start");
  const Eigen::Index m = x0.size();
  InnerTrajectory out;
  Vector x = x0;
  Vector half(m), b_x(m), b_half(m), tmp(m);
  if (recording == TrajectoryRecording::kFull) {
    out.full.reserve(static_cast<std::size_t>(T) + 1);
    out.full.push_back(x);
  }
  std::int64_t next_dyadic = 1;
  for (std::int64_t t = 0; t < T; ++t) {
    const double tau = sub.step(t);
    sub.sample_into(x, seeds.next(), counter, b_x);
    tmp = x - tau * b_x;
    sub.prox_into(tau, tmp, half);
    sub.sample_into(half, seeds.next(), counter, b_half);
    x = half + tau * (b_x - b_half);
    const std::int64_t done = t + 1;
    if (recording == TrajectoryRecording::kFull) out.full.push_back(x);
    if (recording == TrajectoryRecording::kDyadic && done == next_dyadic) {
      out.dyadic.push_back(x);
      next_dyadic *= 2;
    }
  }
  out.final_point = std::move(x);
  return out;
}

MlmcDraw mlmc_estimate(const ResolventSubproblem& sub, std::uint64_t N, std::uint64_t seed,
                       CountingOracle& counter) {
  if (N < 1) throw InvalidArgument("MLMC level cap N must be >= 1");
  CounterRng rng(seed);
  MlmcDraw draw;
  draw.level = rng.geometric_half();
  SeedStream seeds(derive_seed(seed, {1}));
  const std::uint64_t before = counter.calls();
  const bool fits = draw.level < 63 && (std::uint64_t{1} << draw.level) <= N;
  if (!fits) {
    draw.truncated = true;
    draw.estimate = inner_fbf(sub, sub.anchor(), 1, seeds, counter).final_point;
  } else {
    const auto steps = static_cast<std::int64_t>(std::uint64_t{1} << draw.level);
    InnerTrajectory traj = inner_fbf(sub, sub.anchor(), steps, seeds, counter, TrajectoryRecording::kDyadic);
    const auto i = static_cast<std::size_t>(draw.level);
    draw.estimate = traj.dyadic[0] + static_cast<double>(steps) * (traj.dyadic[i] - traj.dyadic[i - 1]);
  }
  draw.oracle_calls = counter.calls() - before;
  return draw;
}

double expected_mlmc_calls(std::uint64_t N) noexcept {
  if (N == 0) return 0.0;
  const int J = std::bit_width(N) - 1;  // floor(log2 N)
  return 2.0 * J + 2.0 * std::ldexp(1.0, -J);
}

}  // namespace svi::mlmc
