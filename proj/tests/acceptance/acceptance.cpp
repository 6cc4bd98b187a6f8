// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset, e.g. `nose_acceptance 3 4`.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nose/detect.hpp"
#include "nose/evalsim.hpp"
#include "nose/io.hpp"
#include "nose/sampler.hpp"
#include "../unit/quadrature.hpp"
#include "../unit/stats.hpp"

using namespace nose;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[2048];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Reduced-length configuration shared by the benchmark-style criteria.
Hyperparameters desk_hyper() {
  Hyperparameters h;
  h.mcmc.chains = 4;
  h.mcmc.iterations = 8000;
  h.mcmc.burn_in = 2000;
  h.mcmc.thin = 8;
  return h;
}

double frac_exact(const BenchmarkReport& r) {
  return static_cast<double>(r.khat_table[3]) / (r.replicates - r.failures);
}

double frac_within_one(const BenchmarkReport& r) {
  return static_cast<double>(r.khat_table[2] + r.khat_table[3] + r.khat_table[4]) / (r.replicates - r.failures);
}

std::string table_string(const KhatTable& t) {
  std::string s = "[";
  for (std::size_t k = 0; k < t.size(); ++k) s += (k ? " " : "") + std::to_string(t[k]);
  return s + "]";
}

Outcome s1_reproduction() {
  const BenchmarkReport r = run_benchmark(Setting::S1, 30, desk_hyper());
  const double exact = frac_exact(r), near = frac_within_one(r);
  const bool pass = r.failures == 0 && exact >= 0.6 && near >= 0.9 && r.recall >= 0.85 && r.precision >= 0.85 &&
                    r.hausdorff_mean <= 0.04;
  // 3-sigma stage false negatives before merging (every S1 jump is >= 1.5). Window 0 is the pinned check;
  // wider windows are reported to show how far candidates sit from the true states.
  const GroundTruth truth = generate(Setting::S1, 0).truth;
  for (long window : {0L, 2L, 5L}) {
    long truths = 0, missed = 0;
    for (const ReplicateOutcome& o : r.per_replicate) {
      if (!o.ok) continue;
      for (long tau : truth.changepoints) {
        ++truths;
        missed += std::none_of(o.candidates.begin(), o.candidates.end(),
                               [&](long c) { return std::abs(c - tau) <= window; });
      }
    }
    const double fn = static_cast<double>(missed) / static_cast<double>(truths);
    std::printf("info: 3-sigma stage false-negative rate on S1 (window %ld, pre-merge) = %.3f%s\n", window, fn,
                window == 0 ? (fn < 0.15 ? " (meets < 0.15)" : " (misses < 0.15)") : "");
  }
  return {pass, fmt("Khat-K table %s, exact %.3f (>=0.6), within-1 %.3f (>=0.9), recall %.3f (>=0.85), "
                    "precision %.3f (>=0.85), Hausdorff %.4f (<=0.04), failures %d",
                    table_string(r.khat_table).c_str(), exact, near, r.recall, r.precision, r.hausdorff_mean,
                    r.failures)};
}

Outcome s6_regression() {
  const BenchmarkReport r = run_benchmark(Setting::S6, 10, desk_hyper());
  const double exact = frac_exact(r);
  return {r.failures == 0 && exact >= 0.8 && r.recall >= 0.95,
          fmt("Khat-K table %s, exact %.2f (>=0.8), recall %.3f (>=0.95), precision %.3f, failures %d",
              table_string(r.khat_table).c_str(), exact, r.recall, r.precision, r.failures)};
}

Outcome prior_reproduction() {
  const Hyperparameters h;
  const long L = h.truncation;
  const Eigen::Index n = 10;
  ChainSampler s(TimeSeries::from_values(Eigen::VectorXd::Zero(n)), {}, h, 2718, false);
  const int retained = 100000, thin = 10, burn = 5000;
  std::vector<double> mcmc_hist(L + 1, 0.0);
  std::vector<double> heights;
  for (int it = 0; it < burn; ++it) {
    s.sweep(it);
    if (it % 50 == 49) s.adapt_scales();
  }
  for (int k = 0; k < retained; ++k) {
    for (int t = 0; t < thin; ++t) s.sweep();
    const auto& z = s.state().indicators;
    mcmc_hist[static_cast<std::size_t>(z.count())] += 1.0 / retained;
    // Heights from well-separated draws so the goodness-of-fit test sees nearly independent values.
    if (k % 20 == 0)
      for (long l = 0; l < L; ++l)
        if (z[l]) heights.push_back(s.state().heights[l]);
  }

  // Direct simulation: alpha ~ Gamma(a, b), p_j = U^(1/alpha), Z_l ~ Bernoulli(prod_{j<=l} p_j).
  Rng rng(31415);
  std::gamma_distribution<double> gamma(h.shape, h.scale);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int direct = 1000000;
  std::vector<double> direct_hist(L + 1, 0.0);
  for (int k = 0; k < direct; ++k) {
    const double alpha = gamma(rng);
    double log_eta = 0.0;
    int count = 0;
    for (long l = 0; l < L; ++l) {
      log_eta += std::log(1.0 - u(rng)) / alpha;
      count += std::log(1.0 - u(rng)) < log_eta;
    }
    direct_hist[static_cast<std::size_t>(count)] += 1.0 / direct;
  }
  double tv = 0.0;
  for (long k = 0; k <= L; ++k) tv += 0.5 * std::abs(mcmc_hist[k] - direct_hist[k]);
  const double a2 = stats::anderson_darling(heights, [](double x) { return 0.5 + std::atan(x) / M_PI; });
  return {tv < 0.03 && a2 < stats::kAndersonDarling1Percent,
          fmt("TV(|Z|) = %.4f over %d draws (<0.03); Anderson-Darling A2 = %.3f on %zu slab heights (<%.3f at 1%%)",
              tv, retained, a2, heights.size(), stats::kAndersonDarling1Percent)};
}

Outcome conditional_oracles() {
  std::vector<std::string> notes;
  bool pass = true;

  // gibbs_alpha against quadrature of Gamma(a, b) x prod_j alpha p_j^(alpha - 1).
  struct AlphaCase {
    double a, b;
    std::vector<double> log_p;
  };
  double worst_alpha = 0.0;
  for (const AlphaCase& c : {AlphaCase{1.0, 1.0, {-1.0}}, AlphaCase{2.0, 3.0, {-1.0, -1.0}},
                             AlphaCase{5.0, 5.0, {-0.05, -0.2, -0.6, -0.01, -1.5}}}) {
    Hyperparameters h;
    h.shape = c.a;
    h.scale = c.b;
    AtomConfiguration cfg = AtomConfiguration::empty(static_cast<Eigen::Index>(c.log_p.size()));
    for (std::size_t j = 0; j < c.log_p.size(); ++j) cfg.log_sticks[static_cast<Eigen::Index>(j)] = c.log_p[j];
    auto logp = [&](double al) {
      double v = (c.a - 1.0) * std::log(al) - al / c.b;
      for (double lp : c.log_p) v += std::log(al) + (al - 1.0) * lp;
      return v;
    };
    const quad::Moments q = quad::positive_moments(logp, -40.0, 7.0);
    Rng rng(99);
    const int draws = 40000000;
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < draws; ++k) {
      const double al = gibbs_alpha(cfg, h, rng).alpha;
      s1 += al;
      s2 += al * al;
    }
    const double m = s1 / draws, sd = std::sqrt(s2 / draws - m * m);
    worst_alpha = std::max({worst_alpha, std::abs(m - q.mean) / q.mean, std::abs(sd - q.sd) / q.sd});
  }
  pass = pass && worst_alpha < 1e-3;
  notes.push_back(fmt("alpha max rel err %.2e", worst_alpha));

  // L = 1 height posterior with Z pinned to 1, location and variance fixed.
  {
    Rng data_rng(2);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) y[i] = (i >= 15 ? 2.0 : 0.0) + 0.7 * standard_normal(data_rng);
    Hyperparameters h;
    h.truncation = 1;
    ChainSampler s(TimeSeries::from_values(y), {}, h, 7);
    AtomConfiguration cfg = AtomConfiguration::empty(1);
    cfg.indicators[0] = true;
    cfg.heights[0] = 2.0;
    cfg.xi[0] = 15.5;
    cfg.nuisance.sigma2 = 0.49;
    s.set_state(cfg);
    auto logp = [&](double hv) {
      double acc = Slab::cauchy().log_density(hv);
      for (int i = 15; i < 30; ++i) acc += -0.5 * (y[i] - hv) * (y[i] - hv) / 0.49;
      return acc;
    };
    const quad::Moments q = quad::moments(logp, -20.0, 20.0, 400000);
    const MoveSet refresh_only{false, false, false, true, false, false};
    for (int k = 0; k < 5000; ++k) {
      s.sweep(k, refresh_only);
      if (k % 50 == 49) s.adapt_scales();
    }
    const long sweeps = 30000000;
    double s1 = 0.0, s2 = 0.0;
    for (long k = 0; k < sweeps; ++k) {
      s.sweep(k, refresh_only);
      const double v = s.state().heights[0];
      s1 += v;
      s2 += v * v;
    }
    const double m = s1 / sweeps, sd = std::sqrt(s2 / sweeps - m * m);
    const double em = std::abs(m - q.mean) / q.mean, es = std::abs(sd - q.sd) / q.sd;
    pass = pass && em < 1e-3 && es < 1e-3;
    notes.push_back(fmt("height rel err mean %.2e sd %.2e", em, es));
  }

  // update_sticks: all Z = 0 (L = 3) marginal of p_1 and L = 1, Z = 1 closed form Beta(alpha + 1, 1).
  {
    AtomConfiguration cfg = AtomConfiguration::empty(3);
    cfg.alpha = 1.3;
    Rng rng(23);
    std::vector<double> p1;
    for (int k = 0; k < 10000; ++k) {
      for (int t = 0; t < 5; ++t) cfg = update_sticks(cfg, rng);
      p1.push_back(std::exp(cfg.log_sticks[0]));
    }
    const int m = 300;
    auto marginal = [&](double p) {
      if (p <= 0.0 || p >= 1.0) return -HUGE_VAL;
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        const double q = (i + 0.5) / m;
        for (int j = 0; j < m; ++j) {
          const double r = (j + 0.5) / m;
          acc += std::pow(q * r, cfg.alpha - 1.0) * (1.0 - p * q) * (1.0 - p * q * r);
        }
      }
      return (cfg.alpha - 1.0) * std::log(p) + std::log1p(-p) + std::log(acc);
    };
    const double ks0 = stats::ks_statistic(p1, quad::grid_cdf(marginal, 0.0, 1.0, 2000));

    AtomConfiguration one = AtomConfiguration::empty(1);
    one.indicators[0] = true;
    one.heights[0] = 1.0;
    one.alpha = 1.7;
    std::vector<double> q1;
    for (int k = 0; k < 10000; ++k) {
      one = update_sticks(one, rng);
      q1.push_back(std::exp(one.log_sticks[0]));
    }
    const double ks1 = stats::ks_statistic(q1, [&](double x) { return std::pow(x, one.alpha + 1.0); });
    pass = pass && ks0 < 0.02 && ks1 < 0.02;
    notes.push_back(fmt("sticks KS %.4f (Z=0, L=3) and %.4f (Z=1, L=1)", ks0, ks1));
  }
  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {pass, detail + " (limits 1e-3, 1e-3, 0.02)"};
}

Outcome geweke() {
  // Light-tailed priors so every monitored functional has finite moments.
  Hyperparameters h;
  h.slab = Slab::laplace(1.0);
  ScenarioSpec spec;
  spec.priors.variance_shape = 3.0;
  spec.priors.variance_scale = 2.0;
  spec.priors.location_sd = 1.0;
  spec.priors.baseline_sd = 1.0;
  const Eigen::Index n = 10;
  const TimeSeries layout = TimeSeries::from_values(Eigen::VectorXd::Zero(n));
  const int draws = 10000;

  auto functionals = [&](const AtomConfiguration& c) {
    return std::array<double, 4>{c.alpha, static_cast<double>(c.indicators.count()), evaluate_step(c, 5.0),
                                 c.nuisance.sigma2};
  };

  // Marginal-conditional simulator: independent prior draws.
  Rng rng(8080);
  std::array<std::vector<double>, 4> marginal, successive;
  for (int k = 0; k < draws; ++k) {
    const auto f = functionals(sample_prior(spec, h, n, rng));
    for (int q = 0; q < 4; ++q) marginal[q].push_back(f[q]);
  }

  // Successive-conditional simulator: alternate y | state and one sampler sweep given y.
  AtomConfiguration start = sample_prior(spec, h, n, rng);
  ChainSampler s(sample_observations(spec.kind, evaluate_curve(start, n), start.nuisance, layout, rng), spec, h, 4242);
  s.set_state(start);
  for (int k = 0; k < draws; ++k) {
    s.set_data(sample_observations(spec.kind, s.theta(), s.state().nuisance, layout, s.rng()));
    s.sweep(k);
    const auto f = functionals(s.state());
    for (int q = 0; q < 4; ++q) successive[q].push_back(f[q]);
  }

  const char* names[4] = {"alpha", "|Z|", "theta(t5)", "sigma2"};
  bool pass = true;
  std::string detail;
  for (int q = 0; q < 4; ++q) {
    const double se_m = std::sqrt(stats::variance(marginal[q]) / draws);
    const double se_s = stats::batch_means_se(successive[q]);
    const double z = (stats::mean(successive[q]) - stats::mean(marginal[q])) / std::hypot(se_m, se_s);
    pass = pass && std::abs(z) < 4.0;
    detail += fmt("%sz(%s) = %+.2f", q ? ", " : "", names[q], z);
  }
  return {pass, detail + fmt(" over %d sweeps (|z| < 4)", draws)};
}

Outcome stick_breaking_identities() {
  Rng rng(1729);
  // E(eta_2 | alpha = 1) with p_j ~ Beta(1, 1).
  const int m = 1000000;
  double s = 0.0;
  for (int k = 0; k < m; ++k) {
    Eigen::Vector2d p(uniform_open(rng), uniform_open(rng));
    s += stick_weights(p)[1];
  }
  const double eta2 = s / m;

  // sum_{l <= 200} E(eta_l) under a = b = 0.5, from the library's prior sampler.
  Hyperparameters h;
  h.truncation = 200;
  h.shape = 0.5;
  h.scale = 0.5;
  const int prior_draws = 100000;
  double t1 = 0.0, t2 = 0.0;
  for (int k = 0; k < prior_draws; ++k) {
    const AtomConfiguration c = sample_prior({}, h, 10, rng);
    const double v = log_stick_weights(c.log_sticks).array().exp().sum();
    t1 += v;
    t2 += v * v;
  }
  const double mass = t1 / prior_draws;
  const double se = std::sqrt((t2 / prior_draws - mass * mass) / prior_draws);
  const double ab = h.shape * h.scale;

  // Folded normal mean through adaptive_lambda: 1 / (n lambda_n(1)) estimates E|y|.
  Eigen::VectorXd y(1000000);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = standard_normal(rng);
  const double folded = 1.0 / (static_cast<double>(y.size()) * adaptive_lambda(y, 1.0));
  const double folded_err = std::abs(folded / std::sqrt(2.0 / M_PI) - 1.0);

  const bool pass = std::abs(eta2 - 0.25) <= 0.01 && mass <= ab + 3.0 * se && folded_err < 0.01;
  return {pass, fmt("E(eta_2|alpha=1) = %.4f (0.25 +/- 0.01); sum E(eta_l) = %.4f <= ab + 3SE = %.4f; "
                    "E|N(0,1)| via adaptive_lambda = %.5f (rel err %.2e < 1e-2)",
                    eta2, mass, ab + 3.0 * se, folded, folded_err)};
}

// Two sets agree when they have the same size and the sorted locations pair up within the benchmark
// matching window. Exact equality is also reported; it fails between two seeds at the same L as well,
// so it measures Monte Carlo jitter of +/- 1-2 states rather than sensitivity to truncation.
bool paired_within(const std::vector<long>& a, const std::vector<long>& b, long window) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > window) return false;
  return true;
}

Outcome truncation_stability() {
  const SimulatedData sim = generate(Setting::S1, 1);
  const long window = BenchmarkReport{}.window;
  int agree = 0, within2 = 0, exact = 0;
  std::string diffs;
  for (int r = 0; r < 30; ++r) {
    std::vector<long> sets[2];
    int idx = 0;
    for (int L : {25, 40}) {
      Hyperparameters h = desk_hyper();
      h.truncation = L;
      h.mcmc.seed = derive_seed(777, static_cast<std::uint64_t>(r));
      sets[idx++] = detect(run_chains(sim.data, {}, h), sim.data, {}, h).changepoints;
    }
    exact += sets[0] == sets[1];
    within2 += paired_within(sets[0], sets[1], 2);
    if (paired_within(sets[0], sets[1], window)) {
      ++agree;
    } else {
      diffs += fmt(" run %d (%zu vs %zu points);", r, sets[0].size(), sets[1].size());
    }
  }
  return {agree >= 27, fmt("L=25 and L=40 sets agree (same size, paired within %ld) in %d of 30 runs (>=27); "
                           "paired within 2 in %d, identical in %d%s",
                           window, agree, within2, exact, diffs.empty() ? "" : (";" + diffs).c_str())};
}

Outcome metric_suite() {
  int failed = 0, total = 0;
  auto expect = [&](bool ok) {
    ++total;
    failed += !ok;
  };
  expect(hausdorff_scaled({50, 120}, {50, 120}, 200) == 0.0);
  expect(std::abs(hausdorff_scaled({50}, {60}, 100) - 0.10) < 1e-15);
  expect(std::abs(hausdorff_scaled({50}, {}, 100) - 0.50) < 1e-15);

  PrecisionRecall pr = precision_recall({50, 100}, {52, 300}, 10);
  expect(pr.tp == 1 && pr.fp == 1 && pr.precision == 0.5 && pr.recall == 0.5);
  pr = precision_recall({50, 100, 150}, {50, 100, 150}, 10);
  expect(pr.precision == 1.0 && pr.recall == 1.0);
  pr = precision_recall({50, 60}, {55}, 10);
  expect(pr.tp == 2 && pr.fp == 0 && pr.precision == 1.0 && pr.recall == 1.0);
  pr = precision_recall({50, 100}, {50, 100}, 0);
  expect(pr.precision == 1.0 && pr.recall == 1.0);

  expect(khat_table(std::vector<std::pair<int, int>>(30, {7, 7})) == KhatTable{0, 0, 0, 30, 0, 0, 0});
  expect(khat_table({{2, 7}, {5, 7}, {7, 7}, {7, 7}, {10, 7}}) == KhatTable{1, 1, 0, 2, 0, 0, 1});
  {
    Rng rng(5);
    std::vector<std::pair<int, int>> many;
    for (int k = 0; k < 300; ++k) many.emplace_back(static_cast<int>(uniform(rng, 0.0, 14.0)), 7);
    long sum = 0;
    for (long c : khat_table(many)) sum += c;
    expect(sum == 300);
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(2000);
  z[1234] = 100.0;
  expect(trimmed_sigma(z) == 0.0);
  expect(trimmed_sigma(Eigen::VectorXd::Constant(40, 3.0)) == 0.0);
  {
    Rng rng(6);
    Eigen::VectorXd g(10000);
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = standard_normal(rng);
    const double sd = std::sqrt((g.array() - g.mean()).square().sum() / (g.size() - 1));
    expect(std::abs(trimmed_sigma(g) / sd - 1.0) < 0.02);
  }

  expect(three_sigma_discriminate(Eigen::Vector3d(0.1, -0.2, 4.0), 0.5) == std::vector<long>{3});
  expect(three_sigma_discriminate(Eigen::VectorXd::Zero(10), 0.7).empty());
  expect(three_sigma_discriminate(Eigen::Vector3d(1.5, -1.5, 0.0), 0.5).empty());

  expect(enforce_min_distance(std::vector<long>{10, 12, 40}, 15) == std::vector<long>{10, 40});
  expect(enforce_min_distance(std::vector<long>{10, 20, 28}, 15) == std::vector<long>{10, 28});
  expect(enforce_min_distance(std::vector<long>{}, 15).empty());
  return {failed == 0, fmt("%d of %d examples reproduced", total - failed, total)};
}

Outcome determinism() {
  std::vector<std::string> broken;
  const SimulatedData sim = generate(Setting::S1, 7);
  Hyperparameters h;
  h.mcmc.iterations = 3000;
  h.mcmc.burn_in = 1000;
  h.mcmc.thin = 5;
  h.mcmc.seed = 99;

  auto detect_json = [&](std::size_t threads) {
    const PosteriorDraws d = run_chains(sim.data, {}, h, threads);
    return dump(to_json(detect(d, sim.data, {}, h), d));
  };
  const std::string d1 = detect_json(1), d2 = detect_json(1), d4 = detect_json(4);
  if (d1 != d2) broken.push_back("detect rerun");
  if (d1 != d4) broken.push_back("detect serial vs 4 threads");

  auto simulate_text = [](Setting s) {
    const SimulatedData g = generate(s, 7);
    std::ostringstream csv;
    write_csv(csv, g.data);
    return csv.str() + dump(to_json(g.truth));
  };
  for (Setting s : all_settings())
    if (simulate_text(s) != simulate_text(s)) broken.push_back("simulate " + std::string(to_string(s)));

  Hyperparameters b = h;
  b.mcmc.iterations = 800;
  b.mcmc.burn_in = 400;
  b.mcmc.chains = 2;
  const std::string r1 = dump(to_json(run_benchmark(Setting::S1, 3, b, 10, 1)));
  const std::string r2 = dump(to_json(run_benchmark(Setting::S1, 3, b, 10, 3)));
  if (r1 != r2) broken.push_back("benchmark serial vs 3 threads");

  const Json parsed = Json::parse(d1);
  if (render_svg(plot_input_from_json(parsed), sim.data) != render_svg(plot_input_from_json(parsed), sim.data))
    broken.push_back("plot");

  std::string detail = broken.empty() ? "detect, simulate (all settings), benchmark and plot outputs are byte-identical "
                                        "across reruns and thread counts"
                                      : "differs:";
  for (const auto& b2 : broken) detail += " " + b2;
  return {broken.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria = {
      {1, {"S1 desk-scale reproduction", s1_reproduction}},
      {2, {"S6 regression-coefficient detection", s6_regression}},
      {3, {"prior reproduction", prior_reproduction}},
      {4, {"conditional-correctness oracles", conditional_oracles}},
      {5, {"Geweke joint-distribution test", geweke}},
      {6, {"stick-breaking identities", stick_breaking_identities}},
      {7, {"truncation stability", truncation_stability}},
      {8, {"metric unit suite", metric_suite}},
      {9, {"determinism", determinism}},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& [id, entry] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = entry.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s (%s) [%.0f s]\n", id, o.pass ? "PASS" : "FAIL", entry.first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
