#ifndef NOSE_SAMPLER_HPP
#define NOSE_SAMPLER_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "nose/random.hpp"
#include "nose/scenario.hpp"
#include "nose/signal.hpp"

namespace nose {

struct MoveCounts {
  long attempts = 0;
  long accepts = 0;
  double rate() const { return attempts == 0 ? 0.0 : static_cast<double>(accepts) / static_cast<double>(attempts); }
};

struct AcceptanceRates {
  MoveCounts birth;
  MoveCounts death;
  MoveCounts height;
  MoveCounts location;
};

struct LatentSummary {
  int active = 0;
  double alpha = 0.0;
  double baseline = 0.0;
  Nuisance nuisance;
};

struct DrawsMeta {
  int chains = 0;
  int iterations = 0;
  int burn_in = 0;
  int thin = 1;
  std::uint64_t seed = 0;
  int per_chain = 0;  // retained draws per chain; rows are grouped by chain
  std::vector<AcceptanceRates> acceptance;  // post-burn-in, one entry per chain
};

/// Retained samples: theta has one row per draw and one column per state.
struct PosteriorDraws {
  Eigen::MatrixXd theta;
  std::vector<LatentSummary> latent;
  DrawsMeta meta;

  Eigen::Index size() const noexcept { return theta.rows(); }
  bool empty() const noexcept { return theta.rows() == 0; }
};

/// Which updates a sweep performs; tests pin parts of the state by switching moves off.
struct MoveSet {
  bool sticks = true;
  bool alpha = true;
  bool toggle = true;   // reversible-jump birth/death of Z_l
  bool refresh = true;  // random-walk refresh of active heights
  bool locations = true;
  bool nuisance = true;
};

/// One Markov chain over the full latent state. Keeps theta(t_i) in sync with
/// the configuration so each move only touches the states it shifts.
class ChainSampler {
 public:
  ChainSampler(TimeSeries data, ScenarioSpec spec, Hyperparameters hyper, std::uint64_t seed,
               bool use_data = true);
  ChainSampler(const ChainSampler&) = delete;
  ChainSampler& operator=(const ChainSampler&) = delete;

  const AtomConfiguration& state() const noexcept { return state_; }
  const Eigen::VectorXd& theta() const noexcept { return theta_; }
  const TimeSeries& data() const noexcept { return data_; }
  const AcceptanceRates& acceptance() const noexcept { return rates_; }
  Rng& rng() noexcept { return rng_; }

  void set_state(const AtomConfiguration& config);
  void set_data(TimeSeries data);
  void reset_acceptance();

  void set_height_scale(double s) { height_scale_.setConstant(s); }
  void set_location_scale(double s) { location_scale_.setConstant(s); }
  const Eigen::VectorXd& height_scales() const noexcept { return height_scale_; }
  const Eigen::VectorXd& location_scales() const noexcept { return location_scale_; }

  void update_sticks();
  void update_alpha();
  void update_heights(bool toggle = true, bool refresh = true);
  void update_locations();
  void update_nuisance();

  /// One full scan: sticks, alpha, heights, locations, nuisance. `iteration` is
  /// only used for diagnostics when a move produces a non-finite state.
  void sweep(long iteration = -1, const MoveSet& moves = {});

  /// Robbins-Monro step on the per-atom random-walk scales toward 44% acceptance,
  /// using the counts since the previous call.
  void adapt_scales();

 private:
  double shift_delta(Eigen::Index first, Eigen::Index last, double shift) const;
  void shift_theta(Eigen::Index first, Eigen::Index last, double shift);
  bool accept(double log_ratio);
  void check_finite(const char* move, long iteration) const;

  TimeSeries data_;
  ScenarioSpec spec_;
  Hyperparameters hyper_;
  bool use_data_;
  Likelihood lik_;
  Rng rng_;
  AtomConfiguration state_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd height_scale_;
  Eigen::VectorXd location_scale_;
  Eigen::VectorXi batch_height_tries_, batch_height_hits_, batch_loc_tries_, batch_loc_hits_;
  int adapt_round_ = 0;
  AcceptanceRates rates_;
};

/// Reflects x into [lo, hi] (mirror at both ends, repeated as needed).
double reflect_into(double x, double lo, double hi);

/// Seed of chain `index` under a master seed.
std::uint64_t chain_seed(std::uint64_t master, int index);

/// Initial state: no active atoms, xi ~ U(0, n), p_j ~ U(0, 1), alpha = a b,
/// baseline and nuisance from data summaries.
AtomConfiguration initial_state(const TimeSeries& data, const ScenarioSpec& spec, const Hyperparameters& hyper,
                                Rng& rng);

/// Draw of the full latent state from the prior over n states.
AtomConfiguration sample_prior(const ScenarioSpec& spec, const Hyperparameters& hyper, Eigen::Index n, Rng& rng);

// Single-move kernels on value configurations.
AtomConfiguration gibbs_alpha(const AtomConfiguration& config, const Hyperparameters& hyper, Rng& rng);
AtomConfiguration update_sticks(const AtomConfiguration& config, Rng& rng);
AtomConfiguration rj_update_heights(const AtomConfiguration& config, const TimeSeries& data, const ScenarioSpec& spec,
                                    const Hyperparameters& hyper, Rng& rng, double refresh_scale = 0.5);
AtomConfiguration mh_update_locations(const AtomConfiguration& config, const TimeSeries& data, const ScenarioSpec& spec,
                                      Rng& rng, double proposal_scale = 1.0);

/// Exact Gamma(a + L, scale) full conditional of alpha given the sticks.
struct GammaParams {
  double shape;
  double scale;
};
GammaParams alpha_conditional(const AtomConfiguration& config, const Hyperparameters& hyper);

PosteriorDraws run_chain(const TimeSeries& data, const ScenarioSpec& spec, const Hyperparameters& hyper,
                         std::uint64_t seed, bool use_data = true);

/// hyper.mcmc.chains chains seeded by chain_seed(hyper.mcmc.seed, c), run on up to
/// `threads` workers (0 = NOSE_THREADS / hardware); output is scheduling independent.
PosteriorDraws run_chains(const TimeSeries& data, const ScenarioSpec& spec, const Hyperparameters& hyper,
                          std::size_t threads = 0, bool use_data = true);

// Convergence diagnostics over equal-length chains.
double gelman_rubin(const std::vector<Eigen::VectorXd>& chains);
double split_rhat(const std::vector<Eigen::VectorXd>& chains);
// Column `state` of the draws split into its chains.
std::vector<Eigen::VectorXd> chain_columns(const PosteriorDraws& draws, Eigen::Index state);

}  // namespace nose

#endif  // NOSE_SAMPLER_HPP
