#include "nose/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nose/parallel.hpp"

namespace nose {
namespace {

constexpr double kTargetAcceptance = 0.44;
constexpr int kAdaptBatch = 50;

double sample_variance(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

void init_nuisance(const TimeSeries& data, const ScenarioSpec& spec, AtomConfiguration& c) {
  const double mean = data.y.mean();
  const double var = sample_variance(data.y);
  c.nuisance.sigma2 = var > 0.0 ? var : 1.0;
  c.nuisance.mean = mean;
  c.nuisance.intercept = 0.0;
  switch (spec.kind) {
    case ScenarioKind::GaussMean:
      c.baseline = mean;
      break;
    case ScenarioKind::PoissonRate:
      c.baseline = std::log(std::max(mean, 0.5 / static_cast<double>(data.size())));
      break;
    case ScenarioKind::GaussScale:
      c.baseline = std::log(var > 0.0 ? var : 1.0);
      break;
    case ScenarioKind::AR1:
    case ScenarioKind::LinReg:
      c.baseline = 0.0;
      c.nuisance.intercept = mean;
      break;
  }
}

}  // namespace

double reflect_into(double x, double lo, double hi) {
  const double w = hi - lo;
  double y = std::fmod(x - lo, 2.0 * w);
  if (y < 0.0) y += 2.0 * w;
  if (y > w) y = 2.0 * w - y;
  return lo + y;
}

std::uint64_t chain_seed(std::uint64_t master, int index) {
  return derive_seed(master, static_cast<std::uint64_t>(index));
}

AtomConfiguration initial_state(const TimeSeries& data, const ScenarioSpec& spec, const Hyperparameters& hyper,
                                Rng& rng) {
  const Eigen::Index L = hyper.truncation;
  const double n = static_cast<double>(data.size());
  AtomConfiguration c = AtomConfiguration::empty(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    c.xi[l] = uniform(rng, 0.0, n);
    c.log_sticks[l] = std::log(uniform_open(rng));
  }
  c.alpha = hyper.shape * hyper.scale;
  init_nuisance(data, spec, c);
  return c;
}

AtomConfiguration sample_prior(const ScenarioSpec& spec, const Hyperparameters& hyper, Eigen::Index n, Rng& rng) {
  const Eigen::Index L = hyper.truncation;
  AtomConfiguration c = AtomConfiguration::empty(L);
  c.alpha = std::max(gamma_shape_scale(rng, hyper.shape, hyper.scale), std::numeric_limits<double>::min());
  double log_eta = 0.0;
  for (Eigen::Index l = 0; l < L; ++l) {
    c.log_sticks[l] = std::log(uniform_open(rng)) / c.alpha;
    log_eta += c.log_sticks[l];
    c.indicators[l] = std::log(uniform_open(rng)) < log_eta;
    c.heights[l] = c.indicators[l] ? hyper.slab.sample(rng) : 0.0;
    c.xi[l] = uniform(rng, 0.0, static_cast<double>(n));
  }
  const auto& pr = spec.priors;
  c.baseline = normal(rng, 0.0, pr.baseline_sd);
  c.nuisance.sigma2 = inverse_gamma(rng, pr.variance_shape, pr.variance_scale);
  c.nuisance.mean = normal(rng, 0.0, pr.location_sd);
  c.nuisance.intercept = normal(rng, 0.0, pr.location_sd);
  return c;
}

GammaParams alpha_conditional(const AtomConfiguration& config, const Hyperparameters& hyper) {
  const double sum_log = config.log_sticks.sum();
  if (!std::isfinite(sum_log)) throw NumericError("stick at zero: log stick sum diverges");
  const double rate = 1.0 / hyper.scale - sum_log;
  return {hyper.shape + static_cast<double>(config.truncation()), 1.0 / rate};
}

ChainSampler::ChainSampler(TimeSeries data, ScenarioSpec spec, Hyperparameters hyper, std::uint64_t seed,
                           bool use_data)
    : data_(std::move(data)),
      spec_(spec),
      hyper_(hyper),
      use_data_(use_data),
      lik_(data_, spec_.kind),
      rng_(seed) {
  hyper_.validate();
  validate(data_, 2);
  const Eigen::Index L = hyper_.truncation;
  height_scale_ = Eigen::VectorXd::Constant(L, 0.5);
  location_scale_ = Eigen::VectorXd::Constant(L, 1.0);
  reset_acceptance();
  state_ = initial_state(data_, spec_, hyper_, rng_);
  theta_ = evaluate_curve(state_, data_.size());
}

void ChainSampler::reset_acceptance() {
  rates_ = {};
  const Eigen::Index L = hyper_.truncation;
  batch_height_tries_ = Eigen::VectorXi::Zero(L);
  batch_height_hits_ = Eigen::VectorXi::Zero(L);
  batch_loc_tries_ = Eigen::VectorXi::Zero(L);
  batch_loc_hits_ = Eigen::VectorXi::Zero(L);
}

void ChainSampler::set_state(const AtomConfiguration& config) {
  validate(config);
  if (config.truncation() != hyper_.truncation) throw ShapeError("configuration truncation differs from L");
  state_ = config;
  theta_ = evaluate_curve(state_, data_.size());
}

void ChainSampler::set_data(TimeSeries data) {
  if (data.size() != data_.size()) throw ShapeError("replacement data must keep the number of states");
  data_ = std::move(data);
  lik_ = Likelihood(data_, spec_.kind);
}

double ChainSampler::shift_delta(Eigen::Index first, Eigen::Index last, double shift) const {
  if (!use_data_) return 0.0;
  return lik_.shift_delta(first, last, theta_, shift, state_.nuisance);
}

void ChainSampler::shift_theta(Eigen::Index first, Eigen::Index last, double shift) {
  if (first < last) theta_.segment(first, last - first).array() += shift;
}

bool ChainSampler::accept(double log_ratio) {
  if (std::isnan(log_ratio) || log_ratio == -std::numeric_limits<double>::infinity()) return false;
  return log_ratio >= 0.0 || std::log(uniform_open(rng_)) < log_ratio;
}

void ChainSampler::update_sticks() {
  const Eigen::Index L = state_.truncation();
  const double alpha = state_.alpha;
  Eigen::VectorXd& ls = state_.log_sticks;
  double prefix = 0.0;  // log eta_{j-1}
  Eigen::VectorXd tail(L);
  for (Eigen::Index j = 0; j < L; ++j) {
    // tail[l] = sum_{j < m <= l} log p_m, so log eta_l = prefix + log p_j + tail[l].
    double acc = 0.0;
    for (Eigen::Index l = j; l < L; ++l) {
      if (l > j) acc += ls[l];
      tail[l] = acc;
    }
    auto log_target = [&](double u) {
      const double lp = std::log(u) / alpha;
      double acc_l = 0.0;
      for (Eigen::Index l = j; l < L; ++l) {
        const double le = prefix + lp + tail[l];
        acc_l += state_.indicators[l] ? le : log1mexp(le);
      }
      return acc_l;
    };
    // In u = p^alpha the Beta(alpha, 1) prior is uniform on (0, 1).
    double u0 = std::exp(alpha * ls[j]);
    u0 = std::clamp(u0, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
    const double u1 = slice_sample_bounded(log_target, u0, 0.0, 1.0, rng_);
    ls[j] = std::min(std::log(u1) / alpha, -std::numeric_limits<double>::denorm_min());
    prefix += ls[j];
  }
}

void ChainSampler::update_alpha() {
  const GammaParams g = alpha_conditional(state_, hyper_);
  state_.alpha = std::max(gamma_shape_scale(rng_, g.shape, g.scale), std::numeric_limits<double>::min());
}

void ChainSampler::update_heights(bool toggle, bool refresh) {
  const Eigen::Index L = state_.truncation();
  const Eigen::Index n = data_.size();
  const Eigen::VectorXd log_eta = log_stick_weights(state_.log_sticks);
  const Slab& slab = hyper_.slab;
  for (Eigen::Index l = 0; l < L; ++l) {
    const Eigen::Index k = first_state_at_or_after(state_.xi[l]);
    if (toggle) {
      const double prior_odds = log_eta[l] - log1mexp(log_eta[l]);
      if (!state_.indicators[l]) {
        // Birth with the slab as proposal: slab terms cancel.
        const double h = slab.sample(rng_);
        const double dll = shift_delta(k, n, h);
        ++rates_.birth.attempts;
        if (std::isfinite(dll) && accept(prior_odds + dll)) {
          state_.indicators[l] = true;
          state_.heights[l] = h;
          shift_theta(k, n, h);
          ++rates_.birth.accepts;
        }
      } else {
        const double h = state_.heights[l];
        const double dll = shift_delta(k, n, -h);
        ++rates_.death.attempts;
        if (std::isfinite(dll) && accept(-prior_odds + dll)) {
          state_.indicators[l] = false;
          state_.heights[l] = 0.0;
          shift_theta(k, n, -h);
          ++rates_.death.accepts;
        }
      }
    }
    if (refresh && state_.indicators[l]) {
      const double h = state_.heights[l];
      const double proposal = h + height_scale_[l] * standard_normal(rng_);
      const double dll = shift_delta(k, n, proposal - h);
      ++rates_.height.attempts;
      ++batch_height_tries_[l];
      if (std::isfinite(dll) && accept(slab.log_density(proposal) - slab.log_density(h) + dll)) {
        state_.heights[l] = proposal;
        shift_theta(k, n, proposal - h);
        ++rates_.height.accepts;
        ++batch_height_hits_[l];
      }
    }
  }
}

void ChainSampler::update_locations() {
  const Eigen::Index L = state_.truncation();
  const double upper = static_cast<double>(data_.size());
  for (Eigen::Index l = 0; l < L; ++l) {
    if (!state_.indicators[l]) {
      state_.xi[l] = uniform(rng_, 0.0, upper);
      continue;
    }
    const double xi = state_.xi[l];
    const double proposal = reflect_into(xi + location_scale_[l] * standard_normal(rng_), 0.0, upper);
    ++rates_.location.attempts;
    ++batch_loc_tries_[l];
    if (!(proposal > 0.0 && proposal < upper)) continue;
    const Eigen::Index k0 = first_state_at_or_after(xi);
    const Eigen::Index k1 = first_state_at_or_after(proposal);
    const double h = state_.heights[l];
    const double dll = k1 > k0 ? shift_delta(k0, k1, -h) : shift_delta(k1, k0, h);
    if (std::isfinite(dll) && accept(dll)) {
      if (k1 > k0) shift_theta(k0, k1, -h);
      else shift_theta(k1, k0, h);
      state_.xi[l] = proposal;
      ++rates_.location.accepts;
      ++batch_loc_hits_[l];
    }
  }
}

void ChainSampler::update_nuisance() {
  update_nuisance_inplace(spec_, data_, state_, theta_, rng_, use_data_);
}

void ChainSampler::check_finite(const char* move, long iteration) const {
  if (!theta_.allFinite()) throw McmcError(move, iteration, "theta is not finite");
  if (!std::isfinite(state_.alpha) || !(state_.alpha > 0.0)) throw McmcError(move, iteration, "alpha is not positive");
  if (!state_.heights.allFinite() || !state_.xi.allFinite() || !state_.log_sticks.allFinite())
    throw McmcError(move, iteration, "atom configuration is not finite");
  const Nuisance& nu = state_.nuisance;
  if (!std::isfinite(nu.sigma2) || !(nu.sigma2 > 0.0) || !std::isfinite(nu.mean) || !std::isfinite(nu.intercept))
    throw McmcError(move, iteration, "nuisance parameters are not finite");
}

void ChainSampler::sweep(long iteration, const MoveSet& moves) {
  if (moves.sticks) {
    update_sticks();
    check_finite("update_sticks", iteration);
  }
  if (moves.alpha) {
    update_alpha();
    check_finite("gibbs_alpha", iteration);
  }
  if (moves.toggle || moves.refresh) {
    update_heights(moves.toggle, moves.refresh);
    check_finite("rj_update_heights", iteration);
  }
  if (moves.locations) {
    update_locations();
    check_finite("mh_update_locations", iteration);
  }
  // Rebuild from the configuration so incremental shifts cannot drift.
  theta_ = evaluate_curve(state_, data_.size());
  if (moves.nuisance) {
    update_nuisance();
    check_finite("update_nuisance", iteration);
  }
}

void ChainSampler::adapt_scales() {
  ++adapt_round_;
  const double gain = std::min(1.0, 4.0 / std::sqrt(static_cast<double>(adapt_round_)));
  const double upper = static_cast<double>(data_.size());
  for (Eigen::Index l = 0; l < state_.truncation(); ++l) {
    if (batch_height_tries_[l] > 0) {
      const double rate = static_cast<double>(batch_height_hits_[l]) / batch_height_tries_[l];
      height_scale_[l] = std::clamp(height_scale_[l] * std::exp(gain * (rate - kTargetAcceptance)), 1e-6, 1e6);
    }
    if (batch_loc_tries_[l] > 0) {
      const double rate = static_cast<double>(batch_loc_hits_[l]) / batch_loc_tries_[l];
      location_scale_[l] = std::clamp(location_scale_[l] * std::exp(gain * (rate - kTargetAcceptance)), 0.05, upper);
    }
  }
  batch_height_tries_.setZero();
  batch_height_hits_.setZero();
  batch_loc_tries_.setZero();
  batch_loc_hits_.setZero();
}

AtomConfiguration gibbs_alpha(const AtomConfiguration& config, const Hyperparameters& hyper, Rng& rng) {
  AtomConfiguration out = config;
  const GammaParams g = alpha_conditional(config, hyper);
  out.alpha = std::max(gamma_shape_scale(rng, g.shape, g.scale), std::numeric_limits<double>::min());
  return out;
}

namespace {

// Throwaway sampler around a value configuration for the single-move kernels.
struct KernelHost {
  KernelHost(const AtomConfiguration& config, const TimeSeries& data, const ScenarioSpec& spec,
             Hyperparameters hyper, bool use_data)
      : sampler(data, spec, [&] {
          hyper.truncation = static_cast<int>(config.truncation());
          return hyper;
        }(), 0, use_data) {}
  ChainSampler sampler;
};

TimeSeries placeholder_series() { return TimeSeries::from_values(Eigen::VectorXd::Zero(4)); }

}  // namespace

AtomConfiguration update_sticks(const AtomConfiguration& config, Rng& rng) {
  validate(config);
  if (config.truncation() == 0) return config;
  KernelHost host(config, placeholder_series(), {}, {}, false);
  host.sampler.set_state(config);
  host.sampler.rng() = rng;
  host.sampler.update_sticks();
  rng = host.sampler.rng();
  return host.sampler.state();
}

AtomConfiguration rj_update_heights(const AtomConfiguration& config, const TimeSeries& data, const ScenarioSpec& spec,
                                    const Hyperparameters& hyper, Rng& rng, double refresh_scale) {
  validate(config);
  KernelHost host(config, data, spec, hyper, true);
  host.sampler.set_state(config);
  host.sampler.set_height_scale(refresh_scale);
  host.sampler.rng() = rng;
  host.sampler.update_heights(true, true);
  rng = host.sampler.rng();
  return host.sampler.state();
}

AtomConfiguration mh_update_locations(const AtomConfiguration& config, const TimeSeries& data, const ScenarioSpec& spec,
                                      Rng& rng, double proposal_scale) {
  validate(config);
  KernelHost host(config, data, spec, {}, true);
  host.sampler.set_state(config);
  host.sampler.set_location_scale(proposal_scale);
  host.sampler.rng() = rng;
  host.sampler.update_locations();
  rng = host.sampler.rng();
  return host.sampler.state();
}

PosteriorDraws run_chain(const TimeSeries& data, const ScenarioSpec& spec, const Hyperparameters& hyper,
                         std::uint64_t seed, bool use_data) {
  hyper.validate();
  validate(data, 4);
  validate(data, spec.kind);
  const McmcSettings& m = hyper.mcmc;
  const int keep = m.retained_per_chain();

  PosteriorDraws draws;
  draws.meta.chains = 1;
  draws.meta.iterations = m.iterations;
  draws.meta.burn_in = m.burn_in;
  draws.meta.thin = m.thin;
  draws.meta.seed = seed;
  draws.meta.per_chain = keep;
  draws.theta.resize(keep, data.size());
  draws.latent.reserve(static_cast<std::size_t>(keep));

  ChainSampler sampler(data, spec, hyper, seed, use_data);
  int row = 0;
  for (long it = 0; it < m.iterations; ++it) {
    sampler.sweep(it);
    if (it < m.burn_in) {
      if ((it + 1) % kAdaptBatch == 0) sampler.adapt_scales();
      if (it + 1 == m.burn_in) sampler.reset_acceptance();
      continue;
    }
    if ((it - m.burn_in + 1) % m.thin != 0 || row >= keep) continue;
    draws.theta.row(row++) = sampler.theta().transpose();
    const AtomConfiguration& s = sampler.state();
    draws.latent.push_back({s.active_count(), s.alpha, s.baseline, s.nuisance});
  }
  draws.meta.acceptance.push_back(sampler.acceptance());
  return draws;
}

PosteriorDraws run_chains(const TimeSeries& data, const ScenarioSpec& spec, const Hyperparameters& hyper,
                          std::size_t threads, bool use_data) {
  hyper.validate();
  const int chains = hyper.mcmc.chains;
  std::vector<PosteriorDraws> parts(static_cast<std::size_t>(chains));
  std::vector<std::string> failures(static_cast<std::size_t>(chains));
  parallel_for(parts.size(), threads, [&](std::size_t c) {
    try {
      parts[c] = run_chain(data, spec, hyper, chain_seed(hyper.mcmc.seed, static_cast<int>(c)), use_data);
    } catch (const McmcError& e) {
      throw McmcError(e.move(), e.iteration(), std::string("chain ") + std::to_string(c) + ": " + e.what());
    }
  });

  PosteriorDraws out;
  out.meta = parts.front().meta;
  out.meta.chains = chains;
  out.meta.seed = hyper.mcmc.seed;
  out.meta.acceptance.clear();
  const Eigen::Index per = parts.front().theta.rows();
  out.theta.resize(per * chains, data.size());
  for (int c = 0; c < chains; ++c) {
    auto& p = parts[static_cast<std::size_t>(c)];
    out.theta.middleRows(per * c, per) = p.theta;
    out.latent.insert(out.latent.end(), p.latent.begin(), p.latent.end());
    out.meta.acceptance.push_back(p.meta.acceptance.front());
  }
  return out;
}

double gelman_rubin(const std::vector<Eigen::VectorXd>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw DegenerateInputError("Gelman-Rubin needs at least two chains");
  const Eigen::Index n = chains.front().size();
  if (n < 2) throw DegenerateInputError("Gelman-Rubin needs at least two draws per chain");
  Eigen::VectorXd means(static_cast<Eigen::Index>(m));
  double within = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (chains[j].size() != n) throw ShapeError("chains must have equal length");
    means[static_cast<Eigen::Index>(j)] = chains[j].mean();
    within += sample_variance(chains[j]);
  }
  within /= static_cast<double>(m);
  const double between = static_cast<double>(n) * sample_variance(means);
  if (within <= 0.0) return between <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  const double pooled = (nn - 1.0) / nn * within + between / nn;
  return std::sqrt(pooled / within);
}

double split_rhat(const std::vector<Eigen::VectorXd>& chains) {
  std::vector<Eigen::VectorXd> halves;
  for (const auto& c : chains) {
    const Eigen::Index h = c.size() / 2;
    halves.emplace_back(c.head(h));
    halves.emplace_back(c.segment(c.size() - h, h));
  }
  return gelman_rubin(halves);
}

std::vector<Eigen::VectorXd> chain_columns(const PosteriorDraws& draws, Eigen::Index state) {
  std::vector<Eigen::VectorXd> out;
  const Eigen::Index per = draws.meta.per_chain;
  for (int c = 0; c < draws.meta.chains; ++c) out.emplace_back(draws.theta.col(state).segment(per * c, per));
  return out;
}

}  // namespace nose
