#include "svi/extragradient.hpp"

#include <string>

#include "run_tracker.hpp"
#include "svi/errors.hpp"

namespace svi::eg {

Vector eg_step(const Vector& z, CountingOracle& counter, double gamma, bool stochastic,
               std::uint64_t seed) {
  if (!(gamma > 0.0)) throw InvalidArgument("extragradient step must be > 0");
  const ProblemInstance& p = counter.problem();
  p.check_dimension(z, "state");
  Vector g(z.size()), half(z.size()), next(z.size());
  auto eval = [&](const Vector& x, std::uint64_t role) {
    if (stochastic) {
      counter.sample_into(x, derive_seed(seed, {role}), g);
    } else {
      counter.evaluate_into(x, g);
    }
  };
  eval(z, 0);
  p.regularizer().prox_into(gamma, z - gamma * g, half);
  eval(half, 1);
  p.regularizer().prox_into(gamma, z - gamma * g, next);
  return next;
}

RunRecord run(const StochasticOracle& oracle, const EgConfig& config) {
  const ProblemInstance& p = oracle.problem();
  if (!(config.gamma > 0.0)) throw InvalidArgument("extragradient step must be > 0");
  if (config.iterations < 1) throw InvalidArgument("iterations must be >= 1");
  Vector z = config.initial_point.value_or(Vector::Ones(p.dimension()));
  p.check_dimension(z, "initial point");
  detail::DigestBuilder digest;
  digest.add("algorithm", std::string("eg"))
      .add("problem", p.name())
      .add("L", p.lipschitz())
      .add("rho", p.rho())
      .add("noise", std::string(to_string(oracle.noise_model())))
      .add("gamma", config.gamma)
      .add("stochastic", config.stochastic)
      .add("K", config.iterations)
      .add("seed", config.seed)
      .add("z0", z);
  detail::RunTracker tracker("eg", config.seed, digest.digest(), config.control, p);
  tracker.set_initial(z);
  CountingOracle counter(oracle);
  std::int64_t last = -1;
  for (std::int64_t k = 0; k < config.iterations; ++k) {
    z = eg_step(z, counter, config.gamma, config.stochastic,
                derive_seed(config.seed, {static_cast<std::uint64_t>(k)}));
    last = k;
    if (!tracker.log(k, counter.calls(), z, residual(p, z))) break;
  }
  return tracker.finish(std::move(z), last + 1);
}

}  // namespace svi::eg
