#ifndef BLACKOUT_PURE_DEATH_HPP
#define BLACKOUT_PURE_DEATH_HPP

#include <span>
#include <vector>

#include "blackout/rng.hpp"

namespace blackout {

// Finite per-dimension label set {0..max_label} replicated over dims
// independent dimensions.
struct StateSpace {
  StateSpace(int max_label, int dims);
  int max_label;
  int dims;
};

// Conditioning data for the bridge law: initial state o at time 0, terminal
// state n at time t, queried at an intermediate time s.
struct BridgeParams {
  BridgeParams(int o, int n, double s, double t);
  int o;
  int n;
  double s;
  double t;

  // Thinning probability r = (e^{-s} - e^{-t}) / (1 - e^{-t}), evaluated by
  // its analytic limits at s = 0 (r = 1) and t -> inf (r = e^{-s}).
  double thinning_probability() const;
};

// Closed-form laws of the unit-rate pure-death process: each unit of a count
// decays independently at rate 1, so X_t | X_0 = o is Binomial(o, e^{-t}).
class PureDeathLaw {
 public:
  explicit PureDeathLaw(StateSpace space) : space_(space) {}

  const StateSpace& space() const { return space_; }

  // pmf of X_t over {0..o} given X_0 = o; log-space evaluation.
  std::vector<double> forward_pmf(int o, double t) const;

  // Element-wise Binomial(x0_i, e^{-t}) draw.
  std::vector<int> sample_forward(std::span<const int> x0, double t,
                                  Rng& rng) const;

  // Reverse-time birth rate m -> m+1 given X_0 = o: (o - m) e^{-t}/(1 - e^{-t}).
  double reverse_rate(int o, int m, double t) const;

  // pmf of X_s over {n..o} given X_0 = o and X_t = n:
  // X_s - n ~ Binomial(o - n, r).
  std::vector<double> bridge_pmf(const BridgeParams& p) const;

  int sample_bridge(const BridgeParams& p, Rng& rng) const;

  // Discrete score of the single (death) transition into state m:
  // (1/(m+1)) ((o e^{-t} - m)/(1 - e^{-t}) - 1).
  double score(int o, int m, double t) const;

 private:
  void check_state(int o) const;
  StateSpace space_;
};

}  // namespace blackout

#endif
