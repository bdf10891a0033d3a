#ifndef BLACKOUT_MATHUTIL_HPP
#define BLACKOUT_MATHUTIL_HPP

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace blackout {

// log of the Binomial(n, p) pmf at k, via log-gamma. Handles p = 0 and p = 1.
inline double log_binomial_pmf(long k, long n, double p) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (p <= 0.0)
    return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (p >= 1.0)
    return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0) + k * std::log(p) +
         (n - k) * std::log1p(-p);
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// Kahan-compensated sum; deterministic for a fixed iteration order and stable
// enough that reorderings agree to ~1e-15 relative.
inline double stable_sum(std::span<const double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace blackout

#endif
