#include "doctest.h"

#include <cmath>

#include "nose/random.hpp"
#include "nose/signal.hpp"

using namespace nose;

namespace {

AtomConfiguration two_atoms(double baseline) {
  AtomConfiguration c = AtomConfiguration::empty(2);
  c.baseline = baseline;
  c.xi << 3.0, 7.0;
  c.heights << 2.0, -1.0;
  c.indicators << true, true;
  return c;
}

// Independent naive oracle for theta(t).
double naive_step(const AtomConfiguration& c, double t) {
  double v = c.baseline;
  for (int l = 0; l < c.truncation(); ++l)
    if (c.indicators[l] && !(t < c.xi[l])) v = v + c.heights[l];
  return v;
}

}  // namespace

TEST_CASE("evaluate_step examples") {
  CHECK(evaluate_step(two_atoms(0.0), 5.0) == doctest::Approx(2.0));
  CHECK(evaluate_step(two_atoms(0.0), 1.0) == doctest::Approx(0.0));
  const auto c = two_atoms(0.5);
  CHECK(evaluate_step(c, 10.0) == doctest::Approx(naive_step(c, 10.0)));
  CHECK(evaluate_step(c, 10.0) == doctest::Approx(1.5));
}

TEST_CASE("evaluate_step is right-continuous at atoms") {
  const auto c = two_atoms(0.0);
  CHECK(evaluate_step(c, 3.0) == doctest::Approx(2.0));
  CHECK(evaluate_step(c, std::nextafter(3.0, 0.0)) == doctest::Approx(0.0));
}

TEST_CASE("evaluate_curve matches the pointwise oracle on random configurations") {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const int L = 1 + rep % 9;
    const Eigen::Index n = 5 + rep % 40;
    AtomConfiguration c = AtomConfiguration::empty(L);
    c.baseline = standard_normal(rng);
    for (int l = 0; l < L; ++l) {
      c.xi[l] = uniform(rng, 0.0, static_cast<double>(n));
      if (rep % 3 == 0) c.xi[l] = std::ceil(c.xi[l]);  // atoms exactly on states
      c.indicators[l] = uniform_open(rng) < 0.6;
      c.heights[l] = c.indicators[l] ? standard_normal(rng) : 0.0;
    }
    const Eigen::VectorXd curve = evaluate_curve(c, n);
    for (Eigen::Index i = 0; i < n; ++i) REQUIRE(curve[i] == doctest::Approx(naive_step(c, i + 1.0)));
  }
}

TEST_CASE("evaluate_step changes value only at active atoms") {
  Rng rng(5);
  AtomConfiguration c = AtomConfiguration::empty(6);
  for (int l = 0; l < 6; ++l) {
    c.xi[l] = uniform(rng, 0.0, 50.0);
    c.indicators[l] = l % 2 == 0;
    c.heights[l] = c.indicators[l] ? 1.0 + l : 0.0;
  }
  std::vector<double> breaks;
  for (int l = 0; l < 6; ++l)
    if (c.indicators[l]) breaks.push_back(c.xi[l]);
  for (double t = 0.0; t < 50.0; t += 0.01) {
    const double a = evaluate_step(c, t), b = evaluate_step(c, t + 0.01);
    if (a != b) {
      const bool crossed = std::any_of(breaks.begin(), breaks.end(), [&](double x) { return x > t && x <= t + 0.01; });
      REQUIRE(crossed);
    }
  }
}

TEST_CASE("adding a positive atom never decreases theta") {
  Rng rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    AtomConfiguration c = AtomConfiguration::empty(3);
    c.baseline = standard_normal(rng);
    for (int l = 0; l < 2; ++l) {
      c.xi[l] = uniform(rng, 0.0, 20.0);
      c.indicators[l] = true;
      c.heights[l] = standard_normal(rng);
    }
    const double t = uniform(rng, 0.0, 20.0);
    const double before = evaluate_step(c, t);
    c.xi[2] = uniform(rng, 0.0, t);
    c.indicators[2] = true;
    c.heights[2] = std::abs(standard_normal(rng));
    CHECK(evaluate_step(c, t) >= before);
  }
}

TEST_CASE("first_state_at_or_after") {
  CHECK(first_state_at_or_after(0.3) == 0);
  CHECK(first_state_at_or_after(1.0) == 0);
  CHECK(first_state_at_or_after(1.2) == 1);
  CHECK(first_state_at_or_after(50.0) == 49);
  CHECK(first_state_at_or_after(49.5) == 49);
}

TEST_CASE("stick_weights examples and errors") {
  Eigen::Vector3d half(0.5, 0.5, 0.5);
  const Eigen::VectorXd eta = stick_weights(half);
  CHECK(eta[0] == doctest::Approx(0.5));
  CHECK(eta[1] == doctest::Approx(0.25));
  CHECK(eta[2] == doctest::Approx(0.125));
  CHECK(stick_weights(Eigen::Vector2d(1.0, 1.0)) == Eigen::Vector2d(1.0, 1.0));
  CHECK_THROWS_AS(stick_weights(Eigen::Vector2d(0.5, 0.0)), DomainError);
  CHECK_THROWS_AS(stick_weights(Eigen::Vector2d(1.5, 0.5)), DomainError);
  // also works on float expressions
  const Eigen::Vector2f f = stick_weights((Eigen::Vector2f() << 0.5f, 0.5f).finished());
  CHECK(f[1] == doctest::Approx(0.25f));
}

TEST_CASE("stick_weights is non-increasing and bounded by its first entry") {
  Rng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd p(10);
    for (int j = 0; j < 10; ++j) p[j] = uniform_open(rng);
    const Eigen::VectorXd eta = stick_weights(p);
    for (int j = 1; j < 10; ++j) {
      CHECK(eta[j] <= eta[j - 1]);
      CHECK(eta[j] <= eta[0]);
    }
    CHECK((log_stick_weights(p.array().log().matrix()).array().exp() - eta.array()).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Monte Carlo mean of eta_2 at alpha = 1") {
  Rng rng(2024);
  const int draws = 1000000;
  double sum = 0.0;
  for (int k = 0; k < draws; ++k) sum += uniform_open(rng) * uniform_open(rng);  // Beta(1, 1) sticks
  CHECK(std::abs(sum / draws - 0.25) < 0.01);
}

TEST_CASE("truncation_tail_bound") {
  CHECK(truncation_tail_bound(1.0, 1.0) == doctest::Approx(1.0));
  CHECK(truncation_tail_bound(0.04, 25.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(truncation_tail_bound(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(truncation_tail_bound(1.0, -2.0), DomainError);
}

TEST_CASE("prior mass sum_{l<=200} eta_l under a = b = 0.5 stays below ab") {
  Rng rng(77);
  const int draws = 100000;
  double total = 0.0, total_sq = 0.0;
  for (int k = 0; k < draws; ++k) {
    const double alpha = gamma_shape_scale(rng, 0.5, 0.5);
    double log_eta = 0.0, s = 0.0;
    for (int l = 0; l < 200; ++l) {
      log_eta += std::log(uniform_open(rng)) / alpha;
      if (log_eta < -745.0) break;
      s += std::exp(log_eta);
    }
    total += s;
    total_sq += s * s;
  }
  const double mean = total / draws;
  const double se = std::sqrt((total_sq / draws - mean * mean) / draws);
  CHECK(mean <= 0.25 + 3.0 * se);
}

TEST_CASE("Slab densities") {
  CHECK(Slab::cauchy().log_density(0.0) == doctest::Approx(-std::log(M_PI)));
  CHECK(Slab::laplace(2.0).log_density(1.0) == doctest::Approx(std::log(1.0) - 2.0));
}

TEST_CASE("Hyperparameters validation") {
  Hyperparameters h;
  CHECK_NOTHROW(h.validate());
  CHECK(h.truncation == 25);
  CHECK(h.min_distance == 15);
  CHECK(h.slab.kind == SlabKind::Cauchy);
  CHECK(h.shape == 5.0);
  CHECK(h.scale == 5.0);
  CHECK(h.mcmc.retained_per_chain() == 1000);
  h.truncation = 0;
  CHECK_THROWS_AS(h.validate(), DomainError);
  h = {};
  h.mcmc.burn_in = h.mcmc.iterations;
  CHECK_THROWS_AS(h.validate(), DomainError);
  h = {};
  h.shape = 0.0;
  CHECK_THROWS_AS(h.validate(), DomainError);
}

TEST_CASE("TimeSeries layouts") {
  const TimeSeries a = TimeSeries::from_values(Eigen::Vector4d(1, 2, 3, 4));
  CHECK(a.size() == 4);
  CHECK(a.states == std::vector<long>{1, 2, 3, 4});
  CHECK_NOTHROW(validate(a, 4));
  CHECK_THROWS_AS(validate(a, 5), ShapeError);

  const TimeSeries g = TimeSeries::from_groups({1, 1, 2, 3, 3}, Eigen::VectorXd::Ones(5), Eigen::VectorXd::Zero(5));
  CHECK(g.size() == 3);
  CHECK(g.begin(0) == 0);
  CHECK(g.end(0) == 2);
  CHECK(g.end(2) == 5);
  CHECK_THROWS_AS(TimeSeries::from_groups({2, 1}, Eigen::VectorXd::Ones(2), Eigen::VectorXd()), ShapeError);
}

TEST_CASE("AtomConfiguration invariants") {
  AtomConfiguration c = AtomConfiguration::empty(3);
  CHECK_NOTHROW(validate(c));
  c.heights[1] = 0.7;  // Z = 0 with nonzero height
  CHECK_THROWS(validate(c));
  c = AtomConfiguration::empty(3);
  c.alpha = 0.0;
  CHECK_THROWS(validate(c));
}
