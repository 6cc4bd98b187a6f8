#include "nose/signal.hpp"

#include <numbers>

namespace nose {

TimeSeries TimeSeries::from_values(const Eigen::VectorXd& values) {
  TimeSeries ts;
  const Eigen::Index n = values.size();
  ts.y = values;
  ts.states.resize(static_cast<std::size_t>(n));
  ts.offsets.resize(static_cast<std::size_t>(n) + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    ts.states[static_cast<std::size_t>(i)] = i + 1;
    ts.offsets[static_cast<std::size_t>(i)] = i;
  }
  ts.offsets.back() = n;
  return ts;
}

TimeSeries TimeSeries::from_groups(const std::vector<long>& group_of, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& x) {
  if (static_cast<Eigen::Index>(group_of.size()) != y.size() || (x.size() != 0 && x.size() != y.size()))
    throw ShapeError("group labels, y and x must have equal length");
  TimeSeries ts;
  ts.y = y;
  ts.x = x;
  for (std::size_t k = 0; k < group_of.size(); ++k) {
    if (k == 0 || group_of[k] != group_of[k - 1]) {
      if (k > 0 && group_of[k] < group_of[k - 1]) throw ShapeError("states must be non-decreasing");
      ts.states.push_back(group_of[k]);
      ts.offsets.push_back(static_cast<Eigen::Index>(k));
    }
  }
  ts.offsets.push_back(y.size());
  return ts;
}

void validate(const TimeSeries& data, Eigen::Index min_states) {
  const Eigen::Index n = data.size();
  if (n < min_states) throw ShapeError("time series needs at least " + std::to_string(min_states) + " states");
  if (data.offsets.size() != data.states.size() + 1) throw ShapeError("offsets must have n + 1 entries");
  if (data.offsets.front() != 0 || data.offsets.back() != data.y.size())
    throw ShapeError("offsets do not cover the observations");
  if (data.has_covariate() && data.x.size() != data.y.size()) throw ShapeError("x and y lengths differ");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.end(i) <= data.begin(i)) throw ShapeError("every state needs at least one observation");
    if (i > 0 && data.states[static_cast<std::size_t>(i)] <= data.states[static_cast<std::size_t>(i) - 1])
      throw ShapeError("states must be strictly increasing");
  }
  if (!data.y.allFinite() || !data.x.allFinite()) throw NumericError("non-finite observation");
}

AtomConfiguration AtomConfiguration::empty(Eigen::Index truncation) {
  AtomConfiguration c;
  c.xi = Eigen::VectorXd::Constant(truncation, 0.5);
  c.heights = Eigen::VectorXd::Zero(truncation);
  c.indicators = Mask::Constant(truncation, false);
  c.log_sticks = Eigen::VectorXd::Constant(truncation, -std::numbers::ln2);
  return c;
}

void validate(const AtomConfiguration& c) {
  const Eigen::Index L = c.truncation();
  if (c.heights.size() != L || c.indicators.size() != L || c.log_sticks.size() != L)
    throw ShapeError("atom configuration vectors must all have length L");
  for (Eigen::Index l = 0; l < L; ++l) {
    if (!c.indicators[l] && c.heights[l] != 0.0) throw DomainError("inactive atom with nonzero height");
    if (!(c.log_sticks[l] < 0.0)) throw DomainError("stick weight outside (0, 1)");
  }
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw DomainError("alpha must be positive");
  if (!c.xi.allFinite() || !c.heights.allFinite() || !std::isfinite(c.baseline))
    throw NumericError("non-finite atom configuration");
}

double Slab::log_density(double h) const {
  if (kind == SlabKind::Cauchy) return -std::log(std::numbers::pi) - std::log1p(h * h);
  return std::log(0.5 * rate) - rate * std::abs(h);
}

double Slab::sample(Rng& rng) const {
  return kind == SlabKind::Cauchy ? standard_cauchy(rng) : nose::laplace(rng, rate);
}

void Hyperparameters::validate() const {
  if (truncation < 1) throw DomainError("truncation L must be >= 1");
  if (min_distance < 1) throw DomainError("minimum distance D must be >= 1");
  if (!(shape > 0.0) || !(scale > 0.0)) throw DomainError("Gamma hyperparameters must be positive");
  if (slab.kind == SlabKind::Laplace && !(slab.rate > 0.0)) throw DomainError("Laplace rate must be positive");
  if (mcmc.chains < 1) throw DomainError("chains must be >= 1");
  if (mcmc.thin < 1) throw DomainError("thinning must be >= 1");
  if (mcmc.burn_in < 0 || mcmc.burn_in >= mcmc.iterations) throw DomainError("burn-in must be < iterations");
}

Eigen::VectorXd evaluate_curve(const AtomConfiguration& config, Eigen::Index n) {
  Eigen::VectorXd jumps = Eigen::VectorXd::Zero(n);
  for (Eigen::Index l = 0; l < config.truncation(); ++l) {
    if (!config.indicators[l]) continue;
    const Eigen::Index k = first_state_at_or_after(config.xi[l]);
    if (k < n) jumps[k] += config.heights[l];
  }
  Eigen::VectorXd theta(n);
  double level = config.baseline;
  for (Eigen::Index i = 0; i < n; ++i) {
    level += jumps[i];
    theta[i] = level;
  }
  return theta;
}

Eigen::VectorXd log_stick_weights(const Eigen::VectorXd& log_sticks) {
  Eigen::VectorXd out(log_sticks.size());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < log_sticks.size(); ++j) {
    acc += log_sticks[j];
    out[j] = acc;
  }
  return out;
}

double truncation_tail_bound(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("truncation_tail_bound requires a, b > 0");
  return a * b;
}

}  // namespace nose
