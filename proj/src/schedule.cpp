#include "blackout/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace blackout {

double fisher_density(double t) {
  if (t <= 0.0) throw std::invalid_argument("fisher_density: need t > 0");
  return 1.0 / (-std::expm1(-t));
}

namespace {

// -log sigmoid(u) = log(1 + e^{-u}), evaluated without cancellation.
double neg_log_sigmoid(double u) {
  if (u >= 0.0) return std::log1p(std::exp(-u));
  return -u + std::log1p(std::exp(u));
}

}  // namespace

Schedule Schedule::make(int count, double horizon) {
  if (count < 2) throw std::invalid_argument("Schedule: need count >= 2");
  if (!(horizon > std::log(2.0)))
    throw std::invalid_argument("Schedule: need horizon > log 2");

  // Logit(1 - e^{-t_T}) = t_T + log(1 - e^{-t_T}); Logit(e^{-t_T}) is its
  // negative, so the grid is symmetric about 0 (i.e. about t = log 2).
  const double a = horizon + std::log(-std::expm1(-horizon));
  std::vector<double> times(count);
  for (int k = 1; k <= count; ++k) {
    const double u = a * (1.0 - 2.0 * (k - 1) / (count - 1.0));
    times[k - 1] = neg_log_sigmoid(u);
  }
  times.back() = horizon;  // exact endpoint
  for (int k = 1; k < count; ++k)
    if (!(times[k] > times[k - 1]))
      throw std::runtime_error("Schedule: times not strictly increasing");
  return Schedule(std::move(times));
}

double Schedule::time(int k) const {
  if (k < 0 || k > count()) throw std::invalid_argument("Schedule: bad index");
  return k == 0 ? 0.0 : times_[k - 1];
}

}  // namespace blackout
