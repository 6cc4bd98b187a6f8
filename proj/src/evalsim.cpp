#include "nose/evalsim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>

#include "nose/detect.hpp"
#include "nose/parallel.hpp"
#include "nose/sampler.hpp"
#include "setting_table.hpp"

namespace nose {
namespace {

template <std::size_t K>
std::vector<long> to_vector(const std::array<long, K>& a) {
  return {a.begin(), a.end()};
}
template <std::size_t K>
std::vector<double> to_vector(const std::array<double, K>& a) {
  return {a.begin(), a.end()};
}

// Segment of 1-based state t under the convention segment k = (tau_{k-1}, tau_k].
std::size_t segment_of(long t, const std::vector<long>& taus) {
  return static_cast<std::size_t>(std::lower_bound(taus.begin(), taus.end(), t) - taus.begin());
}

GroundTruth make_truth(ScenarioKind kind, long n, std::vector<long> taus, std::vector<double> values,
                       std::vector<double> means = {}) {
  GroundTruth g;
  g.kind = kind;
  g.n = n;
  g.changepoints = std::move(taus);
  g.segment_values = std::move(values);
  g.segment_means = std::move(means);
  return g;
}

// Independent Gaussian stream with piecewise-constant mean and SD.
Eigen::VectorXd gaussian_segments(long n, const std::vector<long>& taus, const std::vector<double>& means,
                                  const std::vector<double>& sds, Rng& rng) {
  Eigen::VectorXd y(n);
  for (long t = 1; t <= n; ++t) {
    const std::size_t k = segment_of(t, taus);
    y[t - 1] = normal(rng, means[k], sds[k]);
  }
  return y;
}

SimulatedData gen_mean_shift(Setting s, Rng& rng) {
  using namespace table;
  const long n = kS1Length;
  const auto taus = to_vector(kEqualSpaced);
  const auto mu = to_vector(kS1Means);
  Eigen::VectorXd y(n);
  switch (s) {
    case Setting::S1:
      y = gaussian_segments(n, taus, mu, std::vector<double>(mu.size(), std::sqrt(kS1Variance)), rng);
      break;
    case Setting::MS1: {
      std::student_t_distribution<double> t4(4.0);
      for (long t = 1; t <= n; ++t) y[t - 1] = mu[segment_of(t, taus)] + t4(rng) / std::sqrt(2.0);
      break;
    }
    default: {  // MS2
      double e = standard_normal(rng);
      for (long t = 1; t <= n; ++t) {
        if (t > 1) e = kMS2NoiseAr * e + standard_normal(rng);
        y[t - 1] = mu[segment_of(t, taus)] + e;
      }
      break;
    }
  }
  return {TimeSeries::from_values(y), make_truth(ScenarioKind::GaussMean, n, taus, mu)};
}

SimulatedData gen_s2(Rng& rng) {
  using namespace table;
  const auto taus = to_vector(kS2Changes);
  const auto mu = to_vector(kS2Means);
  const Eigen::VectorXd y = gaussian_segments(kS2Length, taus, mu, std::vector<double>(mu.size(), 1.0), rng);
  return {TimeSeries::from_values(y), make_truth(ScenarioKind::GaussMean, kS2Length, taus, mu)};
}

SimulatedData gen_s3(Rng& rng) {
  using namespace table;
  const auto taus = to_vector(kEqualSpaced);
  const auto rates = to_vector(kS3Rates);
  Eigen::VectorXd y(kS3Length);
  for (long t = 1; t <= kS3Length; ++t)
    y[t - 1] = static_cast<double>(std::poisson_distribution<long>(rates[segment_of(t, taus)])(rng));
  return {TimeSeries::from_values(y), make_truth(ScenarioKind::PoissonRate, kS3Length, taus, rates)};
}

SimulatedData gen_scale(long n, std::vector<long> taus, std::vector<double> means, std::vector<double> sds,
                        Rng& rng) {
  const Eigen::VectorXd y = gaussian_segments(n, taus, means, sds, rng);
  return {TimeSeries::from_values(y),
          make_truth(ScenarioKind::GaussScale, n, std::move(taus), std::move(sds), std::move(means))};
}

SimulatedData gen_autoregressive(Setting s, Rng& rng) {
  using namespace table;
  const bool mixture = s == Setting::MS3;
  const long n = mixture ? kMS3Length : kS5Length;
  const auto taus = mixture ? to_vector(kMS3Changes) : to_vector(kS5Changes);
  const auto lag1 = mixture ? to_vector(kMS3Lag1) : to_vector(kS5Phi);
  const auto lag2 = mixture ? to_vector(kMS3Lag2) : std::vector<double>(lag1.size(), 0.0);
  const double intercept = mixture ? 0.0 : kS5Intercept;
  Eigen::VectorXd y(n);
  y[0] = standard_normal(rng);
  for (long t = 2; t <= n; ++t) {
    const std::size_t k = segment_of(t, taus);
    const double back2 = t > 2 ? y[t - 3] : 0.0;
    y[t - 1] = intercept + lag1[k] * y[t - 2] + lag2[k] * back2 + standard_normal(rng);
  }
  return {TimeSeries::from_values(y), make_truth(ScenarioKind::AR1, n, taus, lag1)};
}

SimulatedData gen_s6(Rng& rng) {
  using namespace table;
  const auto taus = to_vector(kS6Changes);
  const auto coef = to_vector(kS6Coefficients);
  const Eigen::Index m = kS6States * kS6Replicates;
  std::vector<long> group(static_cast<std::size_t>(m));
  Eigen::VectorXd y(m), x(m);
  Eigen::Index k = 0;
  for (long t = 1; t <= kS6States; ++t) {
    for (int j = 0; j < kS6Replicates; ++j, ++k) {
      group[static_cast<std::size_t>(k)] = t;
      x[k] = uniform(rng, -kS6CovariateBound, kS6CovariateBound);
      y[k] = kS6Intercept + coef[segment_of(t, taus)] * x[k] + standard_normal(rng);
    }
  }
  return {TimeSeries::from_groups(group, y, x), make_truth(ScenarioKind::LinReg, kS6States, taus, coef)};
}

std::string normalized(std::string_view name) {
  std::string out;
  for (char c : name)
    if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::S1: return "S1";
    case Setting::S2: return "S2";
    case Setting::S3: return "S3";
    case Setting::S4: return "S4";
    case Setting::S5: return "S5";
    case Setting::S6: return "S6";
    case Setting::MS1: return "MS1";
    case Setting::MS2: return "MS2";
    case Setting::MS3: return "MS3";
    case Setting::DRAIP_SIM: return "DRAIP_SIM";
  }
  return "?";
}

const std::array<Setting, 10>& all_settings() {
  static const std::array<Setting, 10> all = {Setting::S1,  Setting::S2,  Setting::S3,  Setting::S4,
                                              Setting::S5,  Setting::S6,  Setting::MS1, Setting::MS2,
                                              Setting::MS3, Setting::DRAIP_SIM};
  return all;
}

Setting parse_setting(std::string_view name) {
  const std::string key = normalized(name);
  if (key == "DRAIP" || key == "DRAIPSIM") return Setting::DRAIP_SIM;
  for (Setting s : all_settings())
    if (normalized(to_string(s)) == key) return s;
  throw DomainError("unknown setting '" + std::string(name) + "'");
}

SimulatedData generate(Setting setting, std::uint64_t seed) {
  using namespace table;
  Rng rng(seed);
  switch (setting) {
    case Setting::S1:
    case Setting::MS1:
    case Setting::MS2: return gen_mean_shift(setting, rng);
    case Setting::S2: return gen_s2(rng);
    case Setting::S3: return gen_s3(rng);
    case Setting::S4: return gen_scale(kS4Length, to_vector(kS4Changes), to_vector(kS4Means), to_vector(kS4Sds), rng);
    case Setting::S5:
    case Setting::MS3: return gen_autoregressive(setting, rng);
    case Setting::S6: return gen_s6(rng);
    case Setting::DRAIP_SIM:
      return gen_scale(kDraipLength, to_vector(kDraipChanges), to_vector(kDraipMeans), to_vector(kDraipSds), rng);
  }
  throw DomainError("unknown setting");
}

PrecisionRecall precision_recall(const std::vector<long>& truth, const std::vector<long>& estimated, long window) {
  if (window < 0) throw DomainError("window must be non-negative");
  PrecisionRecall r;
  for (long tau : truth) {
    const bool hit = std::any_of(estimated.begin(), estimated.end(), [&](long e) { return std::abs(e - tau) <= window; });
    if (hit) ++r.tp;
  }
  r.fp = std::max(0L, static_cast<long>(estimated.size()) - r.tp);
  r.precision = r.tp + r.fp == 0 ? 1.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  r.recall = truth.empty() ? 1.0 : static_cast<double>(r.tp) / static_cast<double>(truth.size());
  return r;
}

double hausdorff_scaled(const std::vector<long>& truth, const std::vector<long>& estimated, long n) {
  if (n <= 0) throw DomainError("n must be positive");
  std::vector<long> a = truth, b = estimated;
  for (auto* v : {&a, &b}) {
    v->push_back(0);
    v->push_back(n);
  }
  auto directed = [](const std::vector<long>& from, const std::vector<long>& to) {
    long worst = 0;
    for (long p : from) {
      long nearest = std::numeric_limits<long>::max();
      for (long q : to) nearest = std::min(nearest, std::abs(p - q));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return static_cast<double>(std::max(directed(a, b), directed(b, a))) / static_cast<double>(n);
}

KhatTable khat_table(const std::vector<std::pair<int, int>>& khat_and_k) {
  if (khat_and_k.empty()) throw DomainError("khat table needs at least one result");
  KhatTable t{};
  for (const auto& [khat, k] : khat_and_k) {
    const int d = std::clamp(khat - k, -3, 3);
    ++t[static_cast<std::size_t>(d + 3)];
  }
  return t;
}

BenchmarkReport run_benchmark(std::string name, const Generator& generator, int replicates,
                              const Hyperparameters& hyper, long window, std::size_t threads) {
  if (replicates < 1) throw DomainError("replicates must be positive");
  hyper.validate();
  BenchmarkReport report;
  report.setting = std::move(name);
  report.replicates = replicates;
  report.window = window;
  report.per_replicate.resize(static_cast<std::size_t>(replicates));

  parallel_for(static_cast<std::size_t>(replicates), threads, [&](std::size_t r) {
    ReplicateOutcome& out = report.per_replicate[r];
    out.replicate = static_cast<int>(r);
    out.seed = derive_seed(hyper.mcmc.seed, r);
    try {
      const SimulatedData sim = generator(derive_seed(out.seed, 0));
      Hyperparameters h = hyper;
      h.mcmc.seed = derive_seed(out.seed, 1);
      const ScenarioSpec spec{sim.truth.kind, {}};
      const PosteriorDraws draws = run_chains(sim.data, spec, h, 1);
      const DetectionResult det = detect(draws, sim.data, spec, h);
      const PrecisionRecall pr = precision_recall(sim.truth.changepoints, det.changepoints, window);
      out.khat = det.khat();
      out.k = sim.truth.K();
      out.precision = pr.precision;
      out.recall = pr.recall;
      out.hausdorff = hausdorff_scaled(sim.truth.changepoints, det.changepoints, sim.truth.n);
      out.changepoints = det.changepoints;
      out.candidates = det.candidates;
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
  });

  std::vector<std::pair<int, int>> ks;
  for (const ReplicateOutcome& o : report.per_replicate) {
    if (!o.ok) {
      ++report.failures;
      continue;
    }
    ks.emplace_back(o.khat, o.k);
    report.precision += o.precision;
    report.recall += o.recall;
    report.hausdorff_mean += o.hausdorff;
  }
  if (!ks.empty()) {
    const double m = static_cast<double>(ks.size());
    report.khat_table = khat_table(ks);
    report.precision /= m;
    report.recall /= m;
    report.hausdorff_mean /= m;
  }
  return report;
}

BenchmarkReport run_benchmark(Setting setting, int replicates, const Hyperparameters& hyper, long window,
                              std::size_t threads) {
  return run_benchmark(std::string(to_string(setting)), [setting](std::uint64_t seed) { return generate(setting, seed); },
                       replicates, hyper, window, threads);
}

}  // namespace nose
