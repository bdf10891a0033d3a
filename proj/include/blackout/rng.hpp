#ifndef BLACKOUT_RNG_HPP
#define BLACKOUT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace blackout {

// Small counter-friendly generator (splitmix64). Every sampling routine in
// the library takes one of these by reference, so callers own the streams
// and results are reproducible across platforms, unlike <random>
// distributions whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream keyed by (seed, a, b, c), e.g. (seed, sample, dim, step).
  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
    std::uint64_t h = seed;
    h = mix(h ^ (a + 0x9e3779b97f4a7c15ULL));
    h = mix(h ^ (b + 0xbf58476d1ce4e5b9ULL));
    h = mix(h ^ (c + 0x94d049bb133111ebULL));
    return Rng(h);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    return next_u64() % n;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

namespace detail {

// BTRS rejection sampler (Hormann 1993), valid for p <= 0.5 and n*p >= 10.
inline long binomial_btrs(long n, double p, Rng& rng) {
  const double q = 1.0 - p;
  const double spq = std::sqrt(n * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = n * p + 0.5;
  const double vr = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const long m = static_cast<long>((n + 1) * p);
  const double h = std::lgamma(m + 1.0) + std::lgamma(n - m + 1.0);
  for (;;) {
    double u = rng.next_double() - 0.5;
    double v = rng.next_double();
    double us = 0.5 - std::fabs(u);
    long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + c));
    if (k < 0 || k > n) continue;
    if (us >= 0.07 && v <= vr) return k;
    // exact accept test against the pmf ratio f(k)/f(m)
    double lhs = std::log(v * alpha / (a / (us * us) + b));
    if (lhs <= h - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                   (k - m) * lpq)
      return k;
  }
}

// PTRS rejection sampler (Hormann 1993) for Poisson, mean >= 10.
inline long poisson_ptrs(double mean, Rng& rng) {
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double lmu = std::log(mean);
  for (;;) {
    double u = rng.next_double() - 0.5;
    double v = rng.next_double();
    double us = 0.5 - std::fabs(u);
    long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * lmu - mean - std::lgamma(k + 1.0))
      return k;
  }
}

}  // namespace detail

// Binomial(n, p) draw: CDF inversion for small n*p, BTRS rejection otherwise.
inline long sample_binomial(long n, double p, Rng& rng) {
  if (n < 0 || p < 0.0 || p > 1.0)
    throw std::invalid_argument("sample_binomial: bad arguments");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
  if (n * p < 10.0 || n < 32) {
    // inversion by sequential search, pmf recurrence
    const double q = 1.0 - p;
    const double s = p / q;
    double f = std::pow(q, static_cast<double>(n));
    double u = rng.next_double();
    long k = 0;
    while (u > f && k < n) {
      u -= f;
      ++k;
      f *= s * (n - k + 1) / k;
    }
    return k;
  }
  return detail::binomial_btrs(n, p, rng);
}

// Poisson(mean) draw: multiplication method for small means, PTRS otherwise.
inline long sample_poisson(double mean, Rng& rng) {
  if (mean < 0.0 || !std::isfinite(mean))
    throw std::invalid_argument("sample_poisson: bad mean");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    double prod = rng.next_double();
    long k = 0;
    while (prod > limit) {
      prod *= rng.next_double();
      ++k;
    }
    return k;
  }
  return detail::poisson_ptrs(mean, rng);
}

}  // namespace blackout

#endif
