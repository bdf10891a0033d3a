#ifndef BLACKOUT_SCHEDULE_HPP
#define BLACKOUT_SCHEDULE_HPP

#include <vector>

namespace blackout {

// Observation times t_1 < ... < t_T chosen so that Logit(e^{-t_k}) is a
// uniform grid: inverse-transform sampling of the Fisher-information density
// of the forward binomial parameter. t_0 is fixed to 0.
class Schedule {
 public:
  // Requires count >= 2 and horizon > log 2 (the times straddle log 2).
  static Schedule make(int count, double horizon);

  int count() const { return static_cast<int>(times_.size()); }
  double horizon() const { return times_.back(); }

  // t_k for k in 0..T; t_0 = 0.
  double time(int k) const;
  const std::vector<double>& times() const { return times_; }

 private:
  explicit Schedule(std::vector<double> times) : times_(std::move(times)) {}
  std::vector<double> times_;  // t_1..t_T
};

// Unnormalized density of observation times: 1 / (1 - e^{-t}), t > 0.
double fisher_density(double t);

}  // namespace blackout

#endif
