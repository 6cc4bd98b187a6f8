#ifndef NOSE_SIGNAL_HPP
#define NOSE_SIGNAL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "nose/errors.hpp"
#include "nose/random.hpp"

namespace nose {

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Observations indexed by strictly increasing integer states. Every state owns
/// the contiguous block [offsets[i], offsets[i+1]) of y (and x when present), so
/// univariate streams have one observation per state and regression data may
/// carry replicates.
struct TimeSeries {
  std::vector<long> states;
  Eigen::VectorXd y;
  Eigen::VectorXd x;
  std::vector<Eigen::Index> offsets;

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(states.size()); }
  Eigen::Index observations() const noexcept { return y.size(); }
  bool has_covariate() const noexcept { return x.size() > 0; }

  Eigen::Index begin(Eigen::Index i) const { return offsets[static_cast<std::size_t>(i)]; }
  Eigen::Index end(Eigen::Index i) const { return offsets[static_cast<std::size_t>(i) + 1]; }

  // One observation per state, states 1..n.
  static TimeSeries from_values(const Eigen::VectorXd& values);
  // Grouped (y, x) pairs, `group_of[k]` is the state of observation k (non-decreasing).
  static TimeSeries from_groups(const std::vector<long>& group_of, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& x);
};

/// Structural checks: increasing states, consistent offsets, >= 1 observation per state.
void validate(const TimeSeries& data, Eigen::Index min_states = 1);

struct Nuisance {
  double sigma2 = 1.0;     // noise variance (GaussMean, AR1, LinReg)
  double mean = 0.0;       // location mu (GaussScale)
  double intercept = 0.0;  // phi0 (AR1) or beta0 (LinReg)
};

/// One latent state of the sampler. Sticks are stored on the log scale so that
/// Beta(alpha, 1) draws with tiny alpha stay representable; stick_weights()
/// is the natural-scale view.
struct AtomConfiguration {
  Eigen::VectorXd xi;
  Eigen::VectorXd heights;
  Mask indicators;
  Eigen::VectorXd log_sticks;
  double alpha = 1.0;
  double baseline = 0.0;
  Nuisance nuisance;

  Eigen::Index truncation() const noexcept { return xi.size(); }
  Eigen::VectorXd sticks() const { return log_sticks.array().exp().matrix(); }
  int active_count() const { return static_cast<int>(indicators.count()); }

  // L atoms, all inactive, locations 0.5, sticks 1/2, alpha 1.
  static AtomConfiguration empty(Eigen::Index truncation);
};

void validate(const AtomConfiguration& config);

enum class SlabKind { Laplace, Cauchy };

struct Slab {
  SlabKind kind = SlabKind::Cauchy;
  double rate = 1.0;  // Laplace precision; unused for Cauchy

  static Slab cauchy() { return {SlabKind::Cauchy, 1.0}; }
  static Slab laplace(double rate) { return {SlabKind::Laplace, rate}; }

  double log_density(double h) const;
  double sample(Rng& rng) const;
};

struct McmcSettings {
  int chains = 4;
  int iterations = 28000;  // including burn-in
  int burn_in = 8000;
  int thin = 20;
  std::uint64_t seed = 1;

  int retained_per_chain() const { return iterations > burn_in ? (iterations - burn_in) / thin : 0; }
};

struct Hyperparameters {
  int truncation = 25;    // L
  int min_distance = 15;  // D
  double shape = 5.0;     // a
  double scale = 5.0;     // b; prior mean of alpha is ab
  Slab slab = Slab::cauchy();
  McmcSettings mcmc;

  void validate() const;
};

/// theta(t) = baseline + sum_l h_l 1(xi_l <= t).
template <class Scalar>
Scalar evaluate_step(const AtomConfiguration& config, Scalar t) {
  Scalar value = static_cast<Scalar>(config.baseline);
  for (Eigen::Index l = 0; l < config.truncation(); ++l) {
    if (config.indicators[l] && config.xi[l] <= t) value += static_cast<Scalar>(config.heights[l]);
  }
  return value;
}

/// theta evaluated at states 1..n in O(n + L).
Eigen::VectorXd evaluate_curve(const AtomConfiguration& config, Eigen::Index n);

/// Index (0-based) of the first state i in 1..n with i >= xi; the atom at xi
/// shifts states [first_state_at_or_after(xi), n).
inline Eigen::Index first_state_at_or_after(double xi) noexcept {
  const double c = std::ceil(xi);
  return c < 1.0 ? 0 : static_cast<Eigen::Index>(c) - 1;
}

/// eta_l = prod_{j <= l} p_j.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> stick_weights(
    const Eigen::MatrixBase<Derived>& sticks) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eta(sticks.size());
  Scalar running(1);
  for (Eigen::Index j = 0; j < sticks.size(); ++j) {
    const Scalar p = sticks(j);
    if (!(p > Scalar(0) && p <= Scalar(1))) throw DomainError("stick weight outside (0, 1]");
    running *= p;
    eta(j) = running;
  }
  return eta;
}

/// log eta from log sticks (cumulative sum).
Eigen::VectorXd log_stick_weights(const Eigen::VectorXd& log_sticks);

/// Upper bound a*b on sum_l E(eta_l) under alpha ~ Gamma(a, b).
double truncation_tail_bound(double a, double b);

}  // namespace nose

#endif  // NOSE_SIGNAL_HPP
