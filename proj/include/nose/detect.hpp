#ifndef NOSE_DETECT_HPP
#define NOSE_DETECT_HPP

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "nose/sampler.hpp"
#include "nose/scenario.hpp"
#include "nose/signal.hpp"

namespace nose {

/// Maximum-likelihood summary of one segment of the final partition.
/// `coefficient` is the least-squares slope for AR1/LinReg and NaN otherwise.
struct Segment {
  long first_state = 0;
  long last_state = 0;
  Eigen::Index observations = 0;
  double level = 0.0;  // mean of the MAP curve over the segment
  double mean = 0.0;
  double sd = 0.0;
  double coefficient = 0.0;
};

struct DetectionResult {
  Eigen::VectorXd map_curve;
  Eigen::VectorXd zeta;
  double sigma_trimmed = 0.0;
  std::vector<long> candidates;  // 3-sigma survivors before minimum-distance merging
  std::vector<long> changepoints;
  std::vector<Segment> segments;

  int khat() const noexcept { return static_cast<int>(changepoints.size()); }
};

inline constexpr int kModeGridSize = 512;
inline constexpr Eigen::Index kMinModeSamples = 30;

/// Rule-of-thumb bandwidth 0.9 min(sd, IQR / 1.34) N^{-1/5}, falling back to sd,
/// then |x_0|, then 1 when the spread statistic is zero.
double silverman_bandwidth(std::span<const double> samples);

/// Argmax of a Gaussian KDE over a 512-point grid spanning the sample range
/// padded by three bandwidths.
double marginal_map(std::span<const double> samples);

/// zeta_i = map_curve[i + 1] - map_curve[i].
Eigen::VectorXd jump_estimates(const Eigen::VectorXd& map_curve);

/// Sample SD after dropping ceil(0.0005 * count) entries from each tail.
double trimmed_sigma(const Eigen::VectorXd& zeta);

/// States t_i with |zeta_i| > 3 sigma; states default to 1..n.
std::vector<long> three_sigma_discriminate(const Eigen::VectorXd& zeta, double sigma,
                                           std::span<const long> states = {});

/// Greedy left-to-right scan keeping points at least `min_distance` from the last kept one.
std::vector<long> enforce_min_distance(std::span<const long> candidates, long min_distance);

/// delta / sum |y*|: the data-adaptive Laplace precision.
double adaptive_lambda(const Eigen::VectorXd& y_star, double delta);

std::vector<Segment> summarize_segments(const TimeSeries& data, ScenarioKind kind, const std::vector<long>& changepoints,
                                        const Eigen::VectorXd& map_curve);

DetectionResult detect(const PosteriorDraws& draws, const TimeSeries& data, const ScenarioSpec& spec,
                       const Hyperparameters& hyper);

}  // namespace nose

#endif  // NOSE_DETECT_HPP
