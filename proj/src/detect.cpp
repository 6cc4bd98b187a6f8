#include "nose/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nose/parallel.hpp"

namespace nose {
namespace {

double quantile7(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double sd_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Least-squares slope of y on x with an intercept; 0 when x has no spread.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientDrawsError("bandwidth needs at least two samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = sd_of(samples);
  const double iqr = quantile7(sorted, 0.75) - quantile7(sorted, 0.25);
  double lo = std::min(sd, iqr / 1.34);
  if (!(lo > 0.0)) lo = sd;
  if (!(lo > 0.0)) lo = std::abs(sorted.front());
  if (!(lo > 0.0)) lo = 1.0;
  return 0.9 * lo * std::pow(static_cast<double>(samples.size()), -0.2);
}

double marginal_map(std::span<const double> samples) {
  if (static_cast<Eigen::Index>(samples.size()) < kMinModeSamples)
    throw InsufficientDrawsError("marginal MAP needs at least 30 draws");
  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  if (*min_it == *max_it) return *min_it;

  const double bw = silverman_bandwidth(samples);
  const double lo = *min_it - 3.0 * bw;
  const double hi = *max_it + 3.0 * bw;
  const double step = (hi - lo) / (kModeGridSize - 1);
  const Eigen::Map<const Eigen::ArrayXd> x(samples.data(), static_cast<Eigen::Index>(samples.size()));
  const double scale = -0.5 / (bw * bw);

  double best = lo;
  double best_density = -1.0;
  for (int g = 0; g < kModeGridSize; ++g) {
    const double at = lo + step * g;
    const double density = ((x - at).square() * scale).exp().sum();
    if (density > best_density) {
      best_density = density;
      best = at;
    }
  }
  return best;
}

Eigen::VectorXd jump_estimates(const Eigen::VectorXd& map_curve) {
  if (map_curve.size() < 2) throw DegenerateInputError("jump estimates need at least two states");
  return map_curve.tail(map_curve.size() - 1) - map_curve.head(map_curve.size() - 1);
}

double trimmed_sigma(const Eigen::VectorXd& zeta) {
  const Eigen::Index count = zeta.size();
  if (count < 10) throw DegenerateInputError("trimmed sigma needs at least 10 jump estimates");
  // ceil(0.0005 * count) in integer arithmetic.
  const Eigen::Index trim = (count + 1999) / 2000;
  if (count - 2 * trim < 3) throw DegenerateInputError("fewer than 3 entries survive trimming");
  std::vector<double> sorted(zeta.data(), zeta.data() + count);
  std::sort(sorted.begin(), sorted.end());
  const std::span<const double> kept(sorted.data() + trim, static_cast<std::size_t>(count - 2 * trim));
  if (kept.front() == kept.back()) return 0.0;
  return sd_of(kept);
}

std::vector<long> three_sigma_discriminate(const Eigen::VectorXd& zeta, double sigma, std::span<const long> states) {
  if (sigma < 0.0) throw DomainError("sigma must be non-negative");
  if (!states.empty() && static_cast<Eigen::Index>(states.size()) < zeta.size())
    throw ShapeError("need a state label for every jump estimate");
  const double threshold = 3.0 * sigma;
  std::vector<long> out;
  for (Eigen::Index i = 0; i < zeta.size(); ++i) {
    if (std::abs(zeta[i]) > threshold) out.push_back(states.empty() ? static_cast<long>(i) + 1 : states[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<long> enforce_min_distance(std::span<const long> candidates, long min_distance) {
  std::vector<long> kept;
  for (long c : candidates) {
    if (kept.empty() || c - kept.back() >= min_distance) kept.push_back(c);
  }
  return kept;
}

double adaptive_lambda(const Eigen::VectorXd& y_star, double delta) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (y_star.size() < 1) throw DomainError("adaptive lambda needs at least one value");
  const double l1 = y_star.cwiseAbs().sum();
  if (!(l1 > 0.0)) throw DomainError("adaptive lambda undefined for an all-zero series");
  return delta / l1;
}

std::vector<Segment> summarize_segments(const TimeSeries& data, ScenarioKind kind, const std::vector<long>& changepoints,
                                        const Eigen::VectorXd& map_curve) {
  std::vector<Segment> out;
  const Eigen::Index n = data.size();
  Eigen::Index start = 0;
  std::size_t next_cp = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool closes = i == n - 1 ||
                        (next_cp < changepoints.size() && data.states[static_cast<std::size_t>(i)] == changepoints[next_cp]);
    if (!closes) continue;
    if (i < n - 1) ++next_cp;
    Segment seg;
    seg.first_state = data.states[static_cast<std::size_t>(start)];
    seg.last_state = data.states[static_cast<std::size_t>(i)];
    seg.level = map_curve.segment(start, i - start + 1).mean();
    std::vector<double> ys, xs;
    for (Eigen::Index s = start; s <= i; ++s) {
      for (Eigen::Index k = data.begin(s); k < data.end(s); ++k) {
        if (kind == ScenarioKind::AR1) {
          if (k == 0) continue;
          xs.push_back(data.y[k - 1]);
        } else if (kind == ScenarioKind::LinReg) {
          xs.push_back(data.x[k]);
        }
        ys.push_back(data.y[k]);
      }
    }
    seg.observations = static_cast<Eigen::Index>(ys.size());
    double mean = 0.0;
    for (double v : ys) mean += v;
    seg.mean = ys.empty() ? 0.0 : mean / static_cast<double>(ys.size());
    seg.sd = sd_of(ys);
    seg.coefficient = (kind == ScenarioKind::AR1 || kind == ScenarioKind::LinReg)
                          ? ols_slope(xs, ys)
                          : std::numeric_limits<double>::quiet_NaN();
    out.push_back(seg);
    start = i + 1;
  }
  return out;
}

DetectionResult detect(const PosteriorDraws& draws, const TimeSeries& data, const ScenarioSpec& spec,
                       const Hyperparameters& hyper) {
  if (draws.empty()) throw InsufficientDrawsError("no posterior draws");
  if (draws.theta.cols() != data.size()) throw ShapeError("draws and data disagree on the number of states");
  const Eigen::Index n = data.size();
  DetectionResult r;
  r.map_curve.resize(n);
  const Eigen::MatrixXd& th = draws.theta;
  parallel_for(static_cast<std::size_t>(n), 0, [&](std::size_t i) {
    const auto col = th.col(static_cast<Eigen::Index>(i));
    r.map_curve[static_cast<Eigen::Index>(i)] = marginal_map(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
  });
  r.zeta = jump_estimates(r.map_curve);
  r.sigma_trimmed = trimmed_sigma(r.zeta);
  r.candidates = three_sigma_discriminate(r.zeta, r.sigma_trimmed, data.states);
  r.changepoints = enforce_min_distance(r.candidates, hyper.min_distance);
  r.segments = summarize_segments(data, spec.kind, r.changepoints, r.map_curve);
  return r;
}

}  // namespace nose
