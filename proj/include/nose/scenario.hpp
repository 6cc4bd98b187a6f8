#ifndef NOSE_SCENARIO_HPP
#define NOSE_SCENARIO_HPP

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <string_view>

#include "nose/random.hpp"
#include "nose/signal.hpp"

namespace nose {

/// Likelihood families whose parameter theta(t) carries the change mechanism.
///   GaussMean   y_i ~ N(theta_i, sigma2)
///   PoissonRate y_i ~ Poisson(exp(theta_i))
///   GaussScale  y_i ~ N(mu, exp(theta_i))
///   AR1         y_t ~ N(phi0 + theta_t y_{t-1}, sigma2), conditional on y_1
///   LinReg      y_tj ~ N(beta0 + theta_t x_tj, sigma2)
enum class ScenarioKind { GaussMean, PoissonRate, GaussScale, AR1, LinReg };

std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario(std::string_view name);

// Conjugate priors for the nuisance block and the pre-change level theta(-inf).
struct NuisancePriors {
  double variance_shape = 0.01;  // sigma2 ~ InverseGamma(shape, scale)
  double variance_scale = 0.01;
  double location_sd = 10.0;  // mu, phi0, beta0 ~ N(0, sd^2)
  double baseline_sd = 10.0;  // gamma0 ~ N(0, sd^2)
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::GaussMean;
  NuisancePriors priors;
};

/// Checks the data layout a scenario needs (counts, covariates, lagged pairs).
void validate(const TimeSeries& data, ScenarioKind kind);

struct NormalParams {
  double mean;
  double variance;
};

struct InverseGammaParams {
  double shape;
  double scale;
  double mean() const { return shape > 1.0 ? scale / (shape - 1.0) : std::numeric_limits<double>::infinity(); }
};

/// Per-state log-likelihood terms of one scenario over a fixed data set.
class Likelihood {
 public:
  Likelihood(const TimeSeries& data, ScenarioKind kind);

  ScenarioKind kind() const noexcept { return kind_; }
  const TimeSeries& data() const noexcept { return *data_; }
  Eigen::Index size() const noexcept { return data_->size(); }

  double state(Eigen::Index i, double theta, const Nuisance& nuisance) const;
  double total(const Eigen::VectorXd& theta, const Nuisance& nuisance) const;

  /// sum_{i in [first, last)} state(i, theta_i + shift) - state(i, theta_i).
  double shift_delta(Eigen::Index first, Eigen::Index last, const Eigen::VectorXd& theta, double shift,
                     const Nuisance& nuisance) const;

 private:
  const TimeSeries* data_;
  ScenarioKind kind_;
};

double loglik(const ScenarioSpec& spec, const AtomConfiguration& config, const TimeSeries& data);

// Exact full conditionals of the conjugate nuisance coordinates given theta.
InverseGammaParams variance_conditional(const ScenarioSpec& spec, const Eigen::VectorXd& theta,
                                        const Nuisance& nuisance, const TimeSeries& data);
// mu (GaussScale) or the intercept (AR1, LinReg).
NormalParams location_conditional(const ScenarioSpec& spec, const Eigen::VectorXd& theta,
                                  const Nuisance& nuisance, const TimeSeries& data);
// Baseline gamma0 for the kinds where it enters linearly (GaussMean, AR1, LinReg).
NormalParams baseline_conditional(const ScenarioSpec& spec, const AtomConfiguration& config,
                                  const Eigen::VectorXd& theta, const TimeSeries& data);

/// Resamples the nuisance block and the baseline in place; `theta` is kept in
/// sync with the baseline. With `use_data == false` only the baseline is redrawn, from its prior.
void update_nuisance_inplace(const ScenarioSpec& spec, const TimeSeries& data, AtomConfiguration& config,
                             Eigen::VectorXd& theta, Rng& rng, bool use_data = true);

AtomConfiguration update_nuisance(const ScenarioSpec& spec, const AtomConfiguration& config,
                                  const TimeSeries& data, Rng& rng);

/// Draws observations from the scenario likelihood at `theta`. Covariates,
/// grouping and (for AR1) the conditioning value y_1 are copied from `layout`.
TimeSeries sample_observations(ScenarioKind kind, const Eigen::VectorXd& theta, const Nuisance& nuisance,
                               const TimeSeries& layout, Rng& rng);

}  // namespace nose

#endif  // NOSE_SCENARIO_HPP
