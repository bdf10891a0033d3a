#include "blackout/pure_death.hpp"

#include <cmath>
#include <stdexcept>

#include "blackout/mathutil.hpp"

namespace blackout {

StateSpace::StateSpace(int max_label_, int dims_)
    : max_label(max_label_), dims(dims_) {
  if (max_label < 1) throw std::invalid_argument("StateSpace: max_label < 1");
  if (dims < 1) throw std::invalid_argument("StateSpace: dims < 1");
}

BridgeParams::BridgeParams(int o_, int n_, double s_, double t_)
    : o(o_), n(n_), s(s_), t(t_) {
  if (n > o) throw std::invalid_argument("BridgeParams: n > o");
  if (n < 0) throw std::invalid_argument("BridgeParams: n < 0");
  if (s < 0.0 || s > t) throw std::invalid_argument("BridgeParams: need 0 <= s <= t");
}

double BridgeParams::thinning_probability() const {
  if (s == t) return 0.0;
  if (s == 0.0) return 1.0;
  if (std::isinf(t)) return std::exp(-s);
  // (e^{-s} - e^{-t}) / (1 - e^{-t})
  return (std::exp(-s) - std::exp(-t)) / (-std::expm1(-t));
}

void PureDeathLaw::check_state(int o) const {
  if (o < 0 || o > space_.max_label)
    throw std::invalid_argument("PureDeathLaw: state out of range");
}

std::vector<double> PureDeathLaw::forward_pmf(int o, double t) const {
  check_state(o);
  if (t < 0.0) throw std::invalid_argument("forward_pmf: negative time");
  const double q = std::exp(-t);
  std::vector<double> pmf(o + 1);
  for (int m = 0; m <= o; ++m) pmf[m] = std::exp(log_binomial_pmf(m, o, q));
  return pmf;
}

std::vector<int> PureDeathLaw::sample_forward(std::span<const int> x0, double t,
                                              Rng& rng) const {
  if (t < 0.0) throw std::invalid_argument("sample_forward: negative time");
  const double q = std::exp(-t);
  std::vector<int> out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    check_state(x0[i]);
    out[i] = static_cast<int>(sample_binomial(x0[i], q, rng));
  }
  return out;
}

double PureDeathLaw::reverse_rate(int o, int m, double t) const {
  check_state(o);
  if (m < 0 || m > o) throw std::invalid_argument("reverse_rate: need 0 <= m <= o");
  if (t <= 0.0) throw std::invalid_argument("reverse_rate: need t > 0");
  return (o - m) * std::exp(-t) / (-std::expm1(-t));
}

std::vector<double> PureDeathLaw::bridge_pmf(const BridgeParams& p) const {
  check_state(p.o);
  const double r = p.thinning_probability();
  std::vector<double> pmf(p.o - p.n + 1);
  for (int m = p.n; m <= p.o; ++m)
    pmf[m - p.n] = std::exp(log_binomial_pmf(m - p.n, p.o - p.n, r));
  return pmf;
}

int PureDeathLaw::sample_bridge(const BridgeParams& p, Rng& rng) const {
  check_state(p.o);
  const double r = p.thinning_probability();
  return p.n + static_cast<int>(sample_binomial(p.o - p.n, r, rng));
}

double PureDeathLaw::score(int o, int m, double t) const {
  check_state(o);
  if (m < 0 || m > o) throw std::invalid_argument("score: need 0 <= m <= o");
  if (t <= 0.0) throw std::invalid_argument("score: need t > 0");
  const double emt = std::exp(-t);
  const double omemt = -std::expm1(-t);
  return ((o * emt - m) / omemt - 1.0) / (m + 1.0);
}

}  // namespace blackout
