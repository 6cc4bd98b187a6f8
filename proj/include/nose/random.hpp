#ifndef NOSE_RANDOM_HPP
#define NOSE_RANDOM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace nose {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix_seed(mix_seed(master) ^ mix_seed(stream + 0x632BE59BD9B4E019ULL));
}

// Uniform on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform_open(rng); }

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double normal(Rng& rng, double mean, double sd) { return mean + sd * standard_normal(rng); }

inline double gamma_shape_scale(Rng& rng, double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(rng);
}

// InverseGamma(shape, scale): density proportional to x^{-shape-1} exp(-scale / x).
inline double inverse_gamma(Rng& rng, double shape, double scale) {
  return scale / gamma_shape_scale(rng, shape, 1.0);
}

inline double standard_cauchy(Rng& rng) { return std::cauchy_distribution<double>(0.0, 1.0)(rng); }

// Laplace(0, rate): density rate/2 exp(-rate |x|).
inline double laplace(Rng& rng, double rate) {
  const double e = std::exponential_distribution<double>(rate)(rng);
  return (rng() & 1U) ? e : -e;
}

// log(1 - exp(x)) for x <= 0, accurate at both ends.
inline double log1mexp(double x) noexcept {
  if (x >= 0.0) return -std::numeric_limits<double>::infinity();
  return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

inline double log_add_exp(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// Slice sampling update on a bounded interval (lo, hi) using Neal's shrinkage
/// procedure started from the whole interval. `log_density` may return -inf.
template <class LogDensity>
double slice_sample_bounded(LogDensity&& log_density, double x0, double lo, double hi, Rng& rng,
                            double log_f0 = std::numeric_limits<double>::quiet_NaN()) {
  if (std::isnan(log_f0)) log_f0 = log_density(x0);
  const double level = log_f0 + std::log(uniform_open(rng));
  for (int attempt = 0; attempt < 200; ++attempt) {
    const double x1 = uniform(rng, lo, hi);
    if (log_density(x1) > level) return x1;
    if (x1 < x0) {
      lo = x1;
    } else {
      hi = x1;
    }
  }
  return x0;
}

/// Slice sampling update on the real line with stepping out (width w) and shrinkage.
template <class LogDensity>
double slice_sample(LogDensity&& log_density, double x0, double w, Rng& rng, int max_steps = 32) {
  const double level = log_density(x0) + std::log(uniform_open(rng));
  double lo = x0 - w * uniform_open(rng);
  double hi = lo + w;
  int left = static_cast<int>(std::floor(max_steps * uniform_open(rng)));
  int right = max_steps - 1 - left;
  while (left-- > 0 && log_density(lo) > level) lo -= w;
  while (right-- > 0 && log_density(hi) > level) hi += w;
  for (int attempt = 0; attempt < 200; ++attempt) {
    const double x1 = uniform(rng, lo, hi);
    if (log_density(x1) > level) return x1;
    if (x1 < x0) {
      lo = x1;
    } else {
      hi = x1;
    }
  }
  return x0;
}

}  // namespace nose

#endif  // NOSE_RANDOM_HPP
