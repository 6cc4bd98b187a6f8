#ifndef NOSE_EVALSIM_HPP
#define NOSE_EVALSIM_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nose/scenario.hpp"
#include "nose/signal.hpp"

namespace nose {

enum class Setting { S1, S2, S3, S4, S5, S6, MS1, MS2, MS3, DRAIP_SIM };

std::string_view to_string(Setting s);
/// Accepts "S1", "s.1", "MS3", "DRAIP", "draip_sim", ...
Setting parse_setting(std::string_view name);
const std::array<Setting, 10>& all_settings();

/// segment_values holds the changing parameter on its natural scale: means,
/// Poisson rates, SDs (S4, DRAIP_SIM) or first-order/regression coefficients.
/// segment_means is filled for the scale settings, where the mean drifts too.
struct GroundTruth {
  std::vector<long> changepoints;
  std::vector<double> segment_values;
  std::vector<double> segment_means;
  long n = 0;
  ScenarioKind kind = ScenarioKind::GaussMean;

  int K() const noexcept { return static_cast<int>(changepoints.size()); }
};

struct SimulatedData {
  TimeSeries data;
  GroundTruth truth;
};

SimulatedData generate(Setting setting, std::uint64_t seed);

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
  long tp = 0;
  long fp = 0;
};

PrecisionRecall precision_recall(const std::vector<long>& truth, const std::vector<long>& estimated, long window);

/// Two-sided Hausdorff distance between {0, n} u truth and {0, n} u estimated, over n.
double hausdorff_scaled(const std::vector<long>& truth, const std::vector<long>& estimated, long n);

/// Buckets of Khat - K: <=-3, -2, -1, 0, +1, +2, >=+3.
using KhatTable = std::array<long, 7>;
KhatTable khat_table(const std::vector<std::pair<int, int>>& khat_and_k);

struct ReplicateOutcome {
  int replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  int khat = 0;
  int k = 0;
  double precision = 0.0;
  double recall = 0.0;
  double hausdorff = 0.0;
  std::vector<long> changepoints;
  std::vector<long> candidates;  // 3-sigma survivors before merging
};

/// Aggregates are taken over the successful replicates.
struct BenchmarkReport {
  std::string setting;
  int replicates = 0;
  int failures = 0;
  long window = 10;
  KhatTable khat_table{};
  double precision = 0.0;
  double recall = 0.0;
  double hausdorff_mean = 0.0;
  std::vector<ReplicateOutcome> per_replicate;
};

using Generator = std::function<SimulatedData(std::uint64_t seed)>;

/// Replicate r uses seed derive_seed(hyper.mcmc.seed, r) for its data and chains.
/// Replicates run on up to `threads` workers; each replicate runs its chains serially.
BenchmarkReport run_benchmark(std::string name, const Generator& generator, int replicates,
                              const Hyperparameters& hyper, long window = 10, std::size_t threads = 0);
BenchmarkReport run_benchmark(Setting setting, int replicates, const Hyperparameters& hyper, long window = 10,
                              std::size_t threads = 0);

}  // namespace nose

#endif  // NOSE_EVALSIM_HPP
