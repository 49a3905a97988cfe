#include "svi/oracle.hpp"

#include <cmath>
#include <limits>

#include "svi/errors.hpp"

namespace svi {

const char* to_string(NoiseModel model) noexcept {
  switch (model) {
    case NoiseModel::kNone: return "none";
    case NoiseModel::kGaussian: return "gaussian";
    case NoiseModel::kStudentT: return "student_t";
    case NoiseModel::kLaplace: return "laplace";
    case NoiseModel::kMultiplicative: return "multiplicative";
  }
  return "unknown";
}

NoiseSpec NoiseSpec::gaussian(double stddev) {
  NoiseSpec s;
  s.model = NoiseModel::kGaussian;
  s.scale = stddev;
  return s;
}

NoiseSpec NoiseSpec::student_t(double scale, int nu) {
  NoiseSpec s;
  s.model = NoiseModel::kStudentT;
  s.scale = scale;
  s.nu = nu;
  return s;
}

NoiseSpec NoiseSpec::laplace(double scale) {
  NoiseSpec s;
  s.model = NoiseModel::kLaplace;
  s.scale = scale;
  return s;
}

NoiseSpec NoiseSpec::multiplicative(double B, double sigma, std::optional<Vector> anchor) {
  NoiseSpec s;
  s.model = NoiseModel::kMultiplicative;
  s.bound_B = B;
  s.sigma = sigma;
  s.anchor = std::move(anchor);
  return s;
}

StochasticOracle::StochasticOracle(ProblemInstance problem, NoiseSpec spec)
    : problem_(std::move(problem)), spec_(std::move(spec)) {
  const int m = problem_.dimension();
  const double L = problem_.lipschitz();
  auto nonneg = [](double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be a finite value >= 0");
  };
  nonneg(spec_.scale, "noise scale");
  nonneg(spec_.bound_B, "noise bound B");
  nonneg(spec_.sigma, "noise sigma");
  anchor_ = Vector::Zero(m);
  expected_lipschitz_ = L * L;

  switch (spec_.model) {
    case NoiseModel::kNone:
      break;
    case NoiseModel::kGaussian:
      sigma_ = spec_.scale * std::sqrt(static_cast<double>(m));
      break;
    case NoiseModel::kLaplace:
      sigma_ = spec_.scale * std::sqrt(2.0 * m);
      break;
    case NoiseModel::kStudentT:
      if (spec_.nu < 1) throw InvalidArgument("student_t requires nu >= 1");
      // Variance is finite only for nu > 2; no constant is claimed either way.
      sigma_ = spec_.scale == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      variance_certified_ = spec_.scale == 0.0;
      break;
    case NoiseModel::kMultiplicative:
      bound_B_ = spec_.bound_B;
      sigma_ = spec_.sigma;
      if (spec_.anchor) {
        problem_.check_dimension(*spec_.anchor, "noise anchor");
        anchor_ = *spec_.anchor;
      }
      expected_lipschitz_ = L * L + bound_B_ * bound_B_;
      break;
  }
}

StochasticOracle attach_noise(ProblemInstance problem, NoiseSpec spec) {
  return StochasticOracle(std::move(problem), std::move(spec));
}

StochasticOracle StochasticOracle::single_point() const {
  StochasticOracle copy = *this;
  copy.multi_point_ = false;
  copy.expected_lipschitz_.reset();
  return copy;
}

void StochasticOracle::add_noise(const Vector& z, CounterRng& rng, Vector& acc) const {
  const Eigen::Index m = acc.size();
  switch (spec_.model) {
    case NoiseModel::kNone:
      return;
    case NoiseModel::kGaussian:
      if (spec_.scale == 0.0) return;
      for (Eigen::Index i = 0; i < m; ++i) acc[i] += spec_.scale * rng.normal();
      return;
    case NoiseModel::kLaplace:
      if (spec_.scale == 0.0) return;
      for (Eigen::Index i = 0; i < m; ++i) acc[i] += rng.laplace(spec_.scale);
      return;
    case NoiseModel::kStudentT:
      if (spec_.scale == 0.0) return;
      for (Eigen::Index i = 0; i < m; ++i) acc[i] += spec_.scale * rng.student_t(spec_.nu);
      return;
    case NoiseModel::kMultiplicative: {
      const double eta = rng.normal();
      const double zeta_std = spec_.sigma / std::sqrt(static_cast<double>(m));
      for (Eigen::Index i = 0; i < m; ++i) {
        const double zeta = zeta_std == 0.0 ? 0.0 : zeta_std * rng.normal();
        acc[i] += spec_.bound_B * eta * (z[i] - anchor_[i]) + zeta;
      }
      return;
    }
  }
}

Vector StochasticOracle::sample(const Vector& z, std::uint64_t seed) const {
  Vector out(dimension());
  sample_into(z, seed, out);
  return out;
}

void StochasticOracle::sample_into(const Vector& z, std::uint64_t seed, Vector& out) const {
  problem_.apply(z, out);
  CounterRng rng(seed);
  add_noise(z, rng, out);
}

std::pair<Vector, Vector> StochasticOracle::sample_pair(const Vector& z1, const Vector& z2,
                                                        std::uint64_t seed) const {
  std::pair<Vector, Vector> out{Vector(dimension()), Vector(dimension())};
  sample_pair_into(z1, z2, seed, out.first, out.second);
  return out;
}

void StochasticOracle::sample_pair_into(const Vector& z1, const Vector& z2, std::uint64_t seed,
                                        Vector& out1, Vector& out2) const {
  if (!multi_point_) throw CapabilityError("oracle does not support shared-seed evaluation");
  sample_into(z1, seed, out1);
  sample_into(z2, seed, out2);
}

Vector StochasticOracle::minibatch(const Vector& z, std::uint64_t batch, SeedStream& stream) const {
  Vector out(dimension());
  Vector scratch(dimension());
  minibatch_into(z, batch, stream, out, scratch);
  return out;
}

void StochasticOracle::minibatch_into(const Vector& z, std::uint64_t batch, SeedStream& stream,
                                      Vector& out, Vector& scratch) const {
  if (batch == 0) throw InvalidArgument("batch size must be >= 1");
  problem_.apply(z, out);
  if (spec_.model == NoiseModel::kNone) {
    // Noise-free: every sample equals G(z); keep the stream position consistent.
    for (std::uint64_t i = 0; i < batch; ++i) stream.next();
    return;
  }
  scratch.setZero(dimension());
  for (std::uint64_t i = 0; i < batch; ++i) {
    CounterRng rng(stream.next());
    add_noise(z, rng, scratch);
  }
  out += scratch / static_cast<double>(batch);
}

}  // namespace svi
