#include "nose/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>
#include <random>

namespace nose {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

// Regression-type kinds: response, regressor and number of likelihood terms.
bool is_regression(ScenarioKind kind) { return kind == ScenarioKind::AR1 || kind == ScenarioKind::LinReg; }

template <class Fn>
void for_each_term(const TimeSeries& data, ScenarioKind kind, Fn&& fn) {
  // fn(state index, response, regressor)
  if (kind == ScenarioKind::AR1) {
    for (Eigen::Index i = 1; i < data.size(); ++i) fn(i, data.y[i], data.y[i - 1]);
  } else {
    for (Eigen::Index i = 0; i < data.size(); ++i)
      for (Eigen::Index k = data.begin(i); k < data.end(i); ++k) fn(i, data.y[k], data.x[k]);
  }
}

Eigen::Index term_count(const TimeSeries& data, ScenarioKind kind) {
  return kind == ScenarioKind::AR1 ? data.size() - 1 : data.observations();
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::GaussMean: return "gauss-mean";
    case ScenarioKind::PoissonRate: return "poisson";
    case ScenarioKind::GaussScale: return "gauss-scale";
    case ScenarioKind::AR1: return "ar1";
    case ScenarioKind::LinReg: return "linreg";
  }
  return "unknown";
}

ScenarioKind parse_scenario(std::string_view name) {
  const std::string s = lower(name);
  if (s == "gauss-mean" || s == "gaussmean" || s == "mean" || s == "1") return ScenarioKind::GaussMean;
  if (s == "poisson" || s == "poisson-rate" || s == "poissonrate" || s == "2") return ScenarioKind::PoissonRate;
  if (s == "gauss-scale" || s == "gaussscale" || s == "scale" || s == "3") return ScenarioKind::GaussScale;
  if (s == "ar1" || s == "4") return ScenarioKind::AR1;
  if (s == "linreg" || s == "regression" || s == "5") return ScenarioKind::LinReg;
  throw DomainError("unknown scenario '" + std::string(name) + "'");
}

void validate(const TimeSeries& data, ScenarioKind kind) {
  validate(data, 1);
  if (kind == ScenarioKind::LinReg) {
    if (!data.has_covariate()) throw ShapeError("linreg scenario needs a covariate column x");
    return;
  }
  if (data.observations() != data.size()) throw ShapeError(std::string(to_string(kind)) + " needs one observation per state");
  if (kind == ScenarioKind::AR1 && data.size() < 2) throw ShapeError("ar1 scenario needs at least two states");
  if (kind == ScenarioKind::PoissonRate) {
    for (Eigen::Index i = 0; i < data.y.size(); ++i)
      if (data.y[i] < 0.0 || data.y[i] != std::floor(data.y[i]))
        throw ShapeError("poisson scenario needs non-negative integer counts");
  }
}

Likelihood::Likelihood(const TimeSeries& data, ScenarioKind kind) : data_(&data), kind_(kind) {
  validate(data, kind);
}

double Likelihood::state(Eigen::Index i, double theta, const Nuisance& nu) const {
  const TimeSeries& d = *data_;
  switch (kind_) {
    case ScenarioKind::GaussMean: {
      const double r = d.y[i] - theta;
      return -kHalfLog2Pi - 0.5 * std::log(nu.sigma2) - 0.5 * r * r / nu.sigma2;
    }
    case ScenarioKind::PoissonRate:
      return d.y[i] * theta - std::exp(theta) - std::lgamma(d.y[i] + 1.0);
    case ScenarioKind::GaussScale: {
      const double r = d.y[i] - nu.mean;
      return -kHalfLog2Pi - 0.5 * theta - 0.5 * r * r * std::exp(-theta);
    }
    case ScenarioKind::AR1: {
      if (i == 0) return 0.0;
      const double r = d.y[i] - nu.intercept - theta * d.y[i - 1];
      return -kHalfLog2Pi - 0.5 * std::log(nu.sigma2) - 0.5 * r * r / nu.sigma2;
    }
    case ScenarioKind::LinReg: {
      double acc = 0.0;
      for (Eigen::Index k = d.begin(i); k < d.end(i); ++k) {
        const double r = d.y[k] - nu.intercept - theta * d.x[k];
        acc += -kHalfLog2Pi - 0.5 * std::log(nu.sigma2) - 0.5 * r * r / nu.sigma2;
      }
      return acc;
    }
  }
  return 0.0;
}

double Likelihood::total(const Eigen::VectorXd& theta, const Nuisance& nu) const {
  if (!theta.allFinite()) throw NumericError("non-finite theta in likelihood");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < size(); ++i) acc += state(i, theta[i], nu);
  return acc;
}

double Likelihood::shift_delta(Eigen::Index first, Eigen::Index last, const Eigen::VectorXd& theta,
                               double shift, const Nuisance& nu) const {
  if (first >= last || shift == 0.0) return 0.0;
  const TimeSeries& d = *data_;
  switch (kind_) {
    case ScenarioKind::GaussMean: {
      double sum_r = 0.0;
      for (Eigen::Index i = first; i < last; ++i) sum_r += d.y[i] - theta[i];
      const double m = static_cast<double>(last - first);
      return (shift * sum_r - 0.5 * m * shift * shift) / nu.sigma2;
    }
    case ScenarioKind::PoissonRate: {
      double sum_y = 0.0;
      double sum_rate = 0.0;
      for (Eigen::Index i = first; i < last; ++i) {
        sum_y += d.y[i];
        sum_rate += std::exp(theta[i]);
      }
      return shift * sum_y - std::expm1(shift) * sum_rate;
    }
    case ScenarioKind::GaussScale: {
      double q = 0.0;
      for (Eigen::Index i = first; i < last; ++i) {
        const double r = d.y[i] - nu.mean;
        q += r * r * std::exp(-theta[i]);
      }
      const double m = static_cast<double>(last - first);
      return -0.5 * m * shift - 0.5 * std::expm1(-shift) * q;
    }
    case ScenarioKind::AR1: {
      double srx = 0.0;
      double sxx = 0.0;
      for (Eigen::Index i = std::max<Eigen::Index>(first, 1); i < last; ++i) {
        const double x = d.y[i - 1];
        srx += (d.y[i] - nu.intercept - theta[i] * x) * x;
        sxx += x * x;
      }
      return (shift * srx - 0.5 * shift * shift * sxx) / nu.sigma2;
    }
    case ScenarioKind::LinReg: {
      double srx = 0.0;
      double sxx = 0.0;
      for (Eigen::Index i = first; i < last; ++i) {
        for (Eigen::Index k = d.begin(i); k < d.end(i); ++k) {
          const double x = d.x[k];
          srx += (d.y[k] - nu.intercept - theta[i] * x) * x;
          sxx += x * x;
        }
      }
      return (shift * srx - 0.5 * shift * shift * sxx) / nu.sigma2;
    }
  }
  return 0.0;
}

double loglik(const ScenarioSpec& spec, const AtomConfiguration& config, const TimeSeries& data) {
  const Likelihood lik(data, spec.kind);
  if (!std::isfinite(config.nuisance.sigma2) || !(config.nuisance.sigma2 > 0.0) ||
      !std::isfinite(config.nuisance.mean) || !std::isfinite(config.nuisance.intercept))
    throw NumericError("invalid nuisance parameters");
  Eigen::VectorXd theta(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i)
    theta[i] = evaluate_step(config, static_cast<double>(data.states[static_cast<std::size_t>(i)]));
  return lik.total(theta, config.nuisance);
}

InverseGammaParams variance_conditional(const ScenarioSpec& spec, const Eigen::VectorXd& theta,
                                        const Nuisance& nu, const TimeSeries& data) {
  const auto& pr = spec.priors;
  double rss = 0.0;
  Eigen::Index m = 0;
  switch (spec.kind) {
    case ScenarioKind::GaussMean:
      rss = (data.y - theta).squaredNorm();
      m = data.size();
      break;
    case ScenarioKind::AR1:
    case ScenarioKind::LinReg:
      for_each_term(data, spec.kind, [&](Eigen::Index i, double y, double x) {
        const double r = y - nu.intercept - theta[i] * x;
        rss += r * r;
      });
      m = term_count(data, spec.kind);
      break;
    default:
      throw DomainError(std::string(to_string(spec.kind)) + " has no variance parameter");
  }
  return {pr.variance_shape + 0.5 * static_cast<double>(m), pr.variance_scale + 0.5 * rss};
}

NormalParams location_conditional(const ScenarioSpec& spec, const Eigen::VectorXd& theta, const Nuisance& nu,
                                  const TimeSeries& data) {
  const double prior_prec = 1.0 / (spec.priors.location_sd * spec.priors.location_sd);
  if (spec.kind == ScenarioKind::GaussScale) {
    double prec = prior_prec;
    double num = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const double w = std::exp(-theta[i]);
      prec += w;
      num += w * data.y[i];
    }
    return {num / prec, 1.0 / prec};
  }
  if (!is_regression(spec.kind)) throw DomainError(std::string(to_string(spec.kind)) + " has no location parameter");
  double sum_z = 0.0;
  for_each_term(data, spec.kind, [&](Eigen::Index i, double y, double x) { sum_z += y - theta[i] * x; });
  const double prec = static_cast<double>(term_count(data, spec.kind)) / nu.sigma2 + prior_prec;
  return {sum_z / nu.sigma2 / prec, 1.0 / prec};
}

NormalParams baseline_conditional(const ScenarioSpec& spec, const AtomConfiguration& config,
                                  const Eigen::VectorXd& theta, const TimeSeries& data) {
  const Nuisance& nu = config.nuisance;
  const double prior_prec = 1.0 / (spec.priors.baseline_sd * spec.priors.baseline_sd);
  if (spec.kind == ScenarioKind::GaussMean) {
    const double sum_r = (data.y - theta).sum() + config.baseline * static_cast<double>(data.size());
    const double prec = static_cast<double>(data.size()) / nu.sigma2 + prior_prec;
    return {sum_r / nu.sigma2 / prec, 1.0 / prec};
  }
  if (!is_regression(spec.kind))
    throw DomainError("baseline of " + std::string(to_string(spec.kind)) + " is not conjugate");
  double sxz = 0.0;
  double sxx = 0.0;
  for_each_term(data, spec.kind, [&](Eigen::Index i, double y, double x) {
    const double z = y - nu.intercept - (theta[i] - config.baseline) * x;
    sxz += x * z;
    sxx += x * x;
  });
  const double prec = sxx / nu.sigma2 + prior_prec;
  return {sxz / nu.sigma2 / prec, 1.0 / prec};
}

void update_nuisance_inplace(const ScenarioSpec& spec, const TimeSeries& data, AtomConfiguration& config,
                             Eigen::VectorXd& theta, Rng& rng, bool use_data) {
  const auto& pr = spec.priors;
  auto set_baseline = [&](double value) {
    theta.array() += value - config.baseline;
    config.baseline = value;
  };

  if (!use_data) {
    // Without a data term the nuisance block decouples from the atoms; only the
    // baseline is redrawn from its prior.
    set_baseline(normal(rng, 0.0, pr.baseline_sd));
    return;
  }

  const double baseline_prec = 1.0 / (pr.baseline_sd * pr.baseline_sd);
  switch (spec.kind) {
    case ScenarioKind::GaussMean: {
      const NormalParams b = baseline_conditional(spec, config, theta, data);
      set_baseline(normal(rng, b.mean, std::sqrt(b.variance)));
      const InverseGammaParams v = variance_conditional(spec, theta, config.nuisance, data);
      config.nuisance.sigma2 = inverse_gamma(rng, v.shape, v.scale);
      break;
    }
    case ScenarioKind::PoissonRate: {
      // log target in g: g * sum(y) - e^g * sum(exp(theta - gamma0)) - g^2 / (2 sd^2)
      const double sum_y = data.y.sum();
      const double sum_rate = (theta.array() - config.baseline).exp().sum();
      auto log_target = [&](double g) { return g * sum_y - std::exp(g) * sum_rate - 0.5 * g * g * baseline_prec; };
      set_baseline(slice_sample(log_target, config.baseline, 1.0, rng));
      break;
    }
    case ScenarioKind::GaussScale: {
      const NormalParams mu = location_conditional(spec, theta, config.nuisance, data);
      config.nuisance.mean = normal(rng, mu.mean, std::sqrt(mu.variance));
      double q = 0.0;
      for (Eigen::Index i = 0; i < data.size(); ++i) {
        const double r = data.y[i] - config.nuisance.mean;
        q += r * r * std::exp(-(theta[i] - config.baseline));
      }
      const double n = static_cast<double>(data.size());
      auto log_target = [&](double g) { return -0.5 * n * g - 0.5 * std::exp(-g) * q - 0.5 * g * g * baseline_prec; };
      set_baseline(slice_sample(log_target, config.baseline, 1.0, rng));
      break;
    }
    case ScenarioKind::AR1:
    case ScenarioKind::LinReg: {
      const NormalParams b = baseline_conditional(spec, config, theta, data);
      set_baseline(normal(rng, b.mean, std::sqrt(b.variance)));
      const NormalParams c = location_conditional(spec, theta, config.nuisance, data);
      config.nuisance.intercept = normal(rng, c.mean, std::sqrt(c.variance));
      const InverseGammaParams v = variance_conditional(spec, theta, config.nuisance, data);
      config.nuisance.sigma2 = inverse_gamma(rng, v.shape, v.scale);
      break;
    }
  }
}

AtomConfiguration update_nuisance(const ScenarioSpec& spec, const AtomConfiguration& config, const TimeSeries& data,
                                  Rng& rng) {
  validate(config);
  validate(data, spec.kind);
  AtomConfiguration out = config;
  Eigen::VectorXd theta(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i)
    theta[i] = evaluate_step(config, static_cast<double>(data.states[static_cast<std::size_t>(i)]));
  update_nuisance_inplace(spec, data, out, theta, rng, true);
  return out;
}

TimeSeries sample_observations(ScenarioKind kind, const Eigen::VectorXd& theta, const Nuisance& nu,
                               const TimeSeries& layout, Rng& rng) {
  TimeSeries out = layout;
  const double sd = std::sqrt(nu.sigma2);
  switch (kind) {
    case ScenarioKind::GaussMean:
      for (Eigen::Index i = 0; i < out.size(); ++i) out.y[i] = normal(rng, theta[i], sd);
      break;
    case ScenarioKind::PoissonRate:
      for (Eigen::Index i = 0; i < out.size(); ++i)
        out.y[i] = static_cast<double>(std::poisson_distribution<long>(std::exp(theta[i]))(rng));
      break;
    case ScenarioKind::GaussScale:
      for (Eigen::Index i = 0; i < out.size(); ++i) out.y[i] = normal(rng, nu.mean, std::exp(0.5 * theta[i]));
      break;
    case ScenarioKind::AR1:
      for (Eigen::Index i = 1; i < out.size(); ++i) out.y[i] = normal(rng, nu.intercept + theta[i] * out.y[i - 1], sd);
      break;
    case ScenarioKind::LinReg:
      for (Eigen::Index i = 0; i < out.size(); ++i)
        for (Eigen::Index k = out.begin(i); k < out.end(i); ++k)
          out.y[k] = normal(rng, nu.intercept + theta[i] * out.x[k], sd);
      break;
  }
  return out;
}

}  // namespace nose
