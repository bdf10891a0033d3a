#include "blackout/general_ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blackout {

namespace {
constexpr double kUnreachable = 1e-300;  // below this a state has no mass
}

Distribution::Distribution(std::vector<double> p) : probs(std::move(p)) {
  if (probs.empty()) throw std::invalid_argument("Distribution: empty");
  double sum = 0.0;
  for (double& x : probs) {
    if (x < 0.0) {
      if (x < -1e-12) throw std::invalid_argument("Distribution: negative entry");
      x = 0.0;
    }
    sum += x;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("Distribution: does not sum to 1");
}

Distribution Distribution::delta(int m, int max_label) {
  std::vector<double> p(max_label + 1, 0.0);
  if (m < 0 || m > max_label) throw std::invalid_argument("delta: out of range");
  p[m] = 1.0;
  return Distribution(std::move(p));
}

Generator::Generator(int max_label, std::vector<double> entries)
    : max_label_(max_label), entries_(std::move(entries)) {
  validate();
}

void Generator::validate() const {
  const int n = max_label_ + 1;
  if (static_cast<int>(entries_.size()) != n * n)
    throw std::invalid_argument("Generator: bad size");
  for (int from = 0; from < n; ++from) {
    double col = 0.0;
    for (int to = 0; to < n; ++to) {
      const double r = rate(to, from);
      if (to != from && r < 0.0)
        throw std::invalid_argument("Generator: negative off-diagonal rate");
      col += r;
    }
    if (std::fabs(col) > 1e-9)
      throw std::invalid_argument("Generator: column sum not zero");
  }
}

Generator Generator::from_transitions(int max_label,
                                      std::span<const TransitionSpec> specs) {
  const int n = max_label + 1;
  std::vector<double> e(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& spec : specs) {
    if (spec.step < 1) throw std::invalid_argument("TransitionSpec: step < 1");
    if (spec.sign != 1 && spec.sign != -1)
      throw std::invalid_argument("TransitionSpec: sign must be +-1");
    for (int from = 0; from < n; ++from) {
      const int to = from + spec.sign * spec.step;
      if (to < 0 || to > max_label) continue;  // transitions leaving the space
      const double r = spec.rate(from);
      if (r < 0.0) throw std::invalid_argument("TransitionSpec: negative rate");
      e[static_cast<std::size_t>(to) * n + from] += r;
      e[static_cast<std::size_t>(from) * n + from] -= r;
    }
  }
  return Generator(max_label, std::move(e));
}

Generator Generator::pure_death(int max_label) {
  TransitionSpec death{1, -1, [](int m) { return static_cast<double>(m); }};
  return from_transitions(max_label, std::span<const TransitionSpec>(&death, 1));
}

Generator Generator::birth_death(int max_label, double birth_rate,
                                 double death_rate_per_unit) {
  std::vector<TransitionSpec> specs{
      {1, +1, [birth_rate](int) { return birth_rate; }},
      {1, -1, [death_rate_per_unit](int m) { return death_rate_per_unit * m; }}};
  return from_transitions(max_label, specs);
}

Generator Generator::zero(int max_label) {
  const int n = max_label + 1;
  return Generator(max_label, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
}

Generator Generator::from_matrix(int max_label, std::vector<double> entries) {
  return Generator(max_label, std::move(entries));
}

namespace {

// One uniformization pass, valid when lambda*t is moderate.
std::vector<double> uniformize_step(const Generator& g,
                                    const std::vector<double>& p0, double t,
                                    double lambda) {
  const int n = g.max_label() + 1;
  const double a = lambda * t;
  // v <- P v with P = I + L^T / lambda (column-stochastic)
  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> w(n, 0.0);
    for (int from = 0; from < n; ++from) {
      const double x = v[from];
      if (x == 0.0) continue;
      for (int to = 0; to < n; ++to) {
        double p = g.rate(to, from) / lambda;
        if (to == from) p += 1.0;
        if (p != 0.0) w[to] += p * x;
      }
    }
    return w;
  };
  std::vector<double> acc(n, 0.0);
  std::vector<double> term = p0;
  double w = std::exp(-a);  // Poisson weight, k = 0
  double cum = w;
  for (int i = 0; i < n; ++i) acc[i] = w * term[i];
  // tail mass left out of the truncated Poisson sum; the rounding noise of
  // cum itself is ~1e-14, so tightening this further can stall the loop
  const double tail = 1e-12;
  long k = 0;
  while (1.0 - cum > tail) {
    ++k;
    term = apply(term);
    w *= a / k;
    cum += w;
    for (int i = 0; i < n; ++i) acc[i] += w * term[i];
    if (k > 100000) throw std::runtime_error("uniformization did not converge");
  }
  return acc;
}

}  // namespace

Distribution forward_solve(const Generator& g, const Distribution& p0,
                           double t) {
  if (t < 0.0) throw std::invalid_argument("forward_solve: negative time");
  if (p0.max_label() != g.max_label())
    throw std::invalid_argument("forward_solve: size mismatch");
  double lambda = 0.0;
  for (int m = 0; m <= g.max_label(); ++m)
    lambda = std::max(lambda, g.exit_rate(m));
  if (t == 0.0 || lambda == 0.0) return p0;

  // Split large lambda*t into chunks so Poisson weights stay representable.
  const int chunks = std::max(1, static_cast<int>(std::ceil(lambda * t / 400.0)));
  std::vector<double> p = p0.probs;
  for (int c = 0; c < chunks; ++c)
    p = uniformize_step(g, p, t / chunks, lambda);
  return Distribution(std::move(p));
}

int simulate_exact(const Generator& g, int x0, double t, Rng& rng) {
  if (x0 < 0 || x0 > g.max_label())
    throw std::invalid_argument("simulate_exact: state out of range");
  if (t < 0.0) throw std::invalid_argument("simulate_exact: negative time");
  int m = x0;
  double clock = 0.0;
  for (;;) {
    const double total = g.exit_rate(m);
    if (total <= 0.0) return m;
    clock += -std::log1p(-rng.next_double()) / total;
    if (clock > t) return m;
    double u = rng.next_double() * total;
    int target = m;
    for (int to = 0; to <= g.max_label(); ++to) {
      if (to == m) continue;
      u -= g.rate(to, m);
      if (u <= 0.0) {
        target = to;
        break;
      }
    }
    m = target;
  }
}

std::vector<ReverseTransition> reverse_rates(const Generator& g,
                                             const Distribution& p_s, int m) {
  if (p_s.max_label() != g.max_label())
    throw std::invalid_argument("reverse_rates: size mismatch");
  if (m < 0 || m > g.max_label())
    throw std::invalid_argument("reverse_rates: state out of range");
  if (p_s.probs[m] < kUnreachable)
    throw std::runtime_error("reverse_rates: state has no forward mass");
  std::vector<ReverseTransition> out;
  for (int pre = 0; pre <= g.max_label(); ++pre) {
    if (pre == m) continue;
    const double nu = g.rate(m, pre);  // forward pre -> m
    if (nu <= 0.0) continue;
    out.push_back({pre, nu * p_s.probs[pre] / p_s.probs[m]});
  }
  return out;
}

double discrete_score(const Generator& g, const Distribution& p_s, int m,
                      int preimage) {
  if (m < 0 || m > g.max_label() || preimage < 0 || preimage > g.max_label())
    throw std::invalid_argument("discrete_score: state out of range");
  const double nu = g.rate(m, preimage);
  if (preimage == m || nu <= 0.0)
    throw std::invalid_argument("discrete_score: not a forward transition");
  if (p_s.probs[m] < kUnreachable)
    throw std::runtime_error("discrete_score: state has no forward mass");
  return nu * (p_s.probs[preimage] - p_s.probs[m]) / p_s.probs[m];
}

std::pair<double, double> kolmogorov_residuals(const Generator& g, double t,
                                               double fd_step) {
  if (t <= 0.0) throw std::invalid_argument("kolmogorov_residuals: need t > 0");
  const int n = g.max_label() + 1;
  auto propagator = [&](double at) {
    // column o holds p(.,at | o,0)
    std::vector<std::vector<double>> cols(n);
    for (int o = 0; o < n; ++o)
      cols[o] = forward_solve(g, Distribution::delta(o, g.max_label()), at).probs;
    return cols;
  };
  const auto P = propagator(t);
  const auto Pp = propagator(t + fd_step);
  const auto Pm = propagator(t - fd_step);
  double rf = 0.0, rb = 0.0;
  for (int o = 0; o < n; ++o) {
    for (int m = 0; m < n; ++m) {
      const double dP = (Pp[o][m] - Pm[o][m]) / (2.0 * fd_step);
      double lp = 0.0;  // (L^T P)[m][o]
      for (int j = 0; j < n; ++j) lp += g.rate(m, j) * P[o][j];
      rf = std::max(rf, std::fabs(dP - lp));
      double pl = 0.0;  // (P L^T)[m][o]
      for (int j = 0; j < n; ++j) pl += P[j][m] * g.rate(j, o);
      rb = std::max(rb, std::fabs(dP - pl));
    }
  }
  return {rf, rb};
}

ReverseSimulator::ReverseSimulator(const Generator& g, const Distribution& p0,
                                   double s, double t, double max_rate_dt) {
  if (!(s <= t)) throw std::invalid_argument("ReverseSimulator: need s <= t");
  if (s == t) {
    grid_laws_.push_back(forward_solve(g, p0, s));
    return;
  }
  int substeps = 256;
  for (int pass = 0; pass < 4; ++pass) {
    build(g, p0, s, t, substeps);
    double max_rate = 0.0;
    for (const auto& per_state : rates_)
      for (const auto& trans : per_state) {
        double total = 0.0;
        for (const auto& rt : trans) total += rt.rate;
        max_rate = std::max(max_rate, total);
      }
    const int needed = static_cast<int>(
        std::ceil((t - s) * max_rate / max_rate_dt * 1.05));
    if (needed <= substeps) return;
    substeps = needed;
  }
  throw std::runtime_error("ReverseSimulator: substep selection did not settle");
}

void ReverseSimulator::build(const Generator& g, const Distribution& p0,
                             double s, double t, int substeps) {
  dt_ = (t - s) / substeps;
  grid_laws_.clear();
  rates_.clear();
  grid_laws_.reserve(substeps + 1);
  grid_laws_.push_back(forward_solve(g, p0, s));
  for (int j = 1; j <= substeps; ++j)
    grid_laws_.push_back(forward_solve(g, grid_laws_.back(), dt_));

  rates_.resize(substeps + 1);
  for (int j = 1; j <= substeps; ++j) {
    const Distribution& law = grid_laws_[j];
    rates_[j].resize(g.max_label() + 1);
    for (int m = 0; m <= g.max_label(); ++m) {
      if (law.probs[m] < kUnreachable) continue;  // unreachable, no rates
      rates_[j][m] = reverse_rates(g, law, m);
    }
  }
}

int ReverseSimulator::run(int terminal_state, Rng& rng) const {
  const int max_label = static_cast<int>(grid_laws_.front().probs.size()) - 1;
  if (terminal_state < 0 || terminal_state > max_label)
    throw std::invalid_argument("ReverseSimulator: state out of range");
  int m = terminal_state;
  for (int j = substeps(); j >= 1; --j) {
    const auto& trans = rates_[j][m];
    int net = 0;
    for (const auto& rt : trans) {
      const long c = sample_poisson(rt.rate * dt_, rng);
      net += static_cast<int>(c) * (rt.target - m);
    }
    m = std::clamp(m + net, 0, max_label);
  }
  return m;
}

void save_generator(const Generator& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_generator: cannot open " + path);
  out << "M=" << g.max_label() << "\n";
  out.precision(17);
  for (int to = 0; to <= g.max_label(); ++to) {
    for (int from = 0; from <= g.max_label(); ++from) {
      if (from) out << ' ';
      out << g.rate(to, from);
    }
    out << "\n";
  }
}

Generator load_generator(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_generator: cannot open " + path);
  std::string header;
  std::getline(in, header);
  int max_label = -1;
  if (header.rfind("M=", 0) != 0 ||
      (max_label = std::stoi(header.substr(2))) < 1)
    throw std::runtime_error("load_generator: bad header");
  const int n = max_label + 1;
  std::vector<double> e;
  e.reserve(static_cast<std::size_t>(n) * n);
  double x;
  while (in >> x) e.push_back(x);
  if (static_cast<int>(e.size()) != n * n)
    throw std::runtime_error("load_generator: wrong entry count");
  return Generator::from_matrix(max_label, std::move(e));
}

}  // namespace blackout
