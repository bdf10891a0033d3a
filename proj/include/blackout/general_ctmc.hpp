#ifndef BLACKOUT_GENERAL_CTMC_HPP
#define BLACKOUT_GENERAL_CTMC_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "blackout/rng.hpp"

namespace blackout {

// Probability vector over {0..M}.
struct Distribution {
  explicit Distribution(std::vector<double> p);
  static Distribution delta(int m, int max_label);

  int max_label() const { return static_cast<int>(probs.size()) - 1; }
  std::vector<double> probs;
};

// A family of transitions m -> m + sign*step with a state-dependent rate.
struct TransitionSpec {
  int step;                             // >= 1
  int sign;                             // +1 or -1
  std::function<double(int)> rate;      // rate as a function of the source state
};

// Generator of a continuous-time Markov process on {0..M}. rate(to, from)
// with to != from is the forward transition rate from -> to; diagonal entries
// balance each column so d/dt p = L^T p conserves probability.
class Generator {
 public:
  static Generator from_transitions(int max_label,
                                    std::span<const TransitionSpec> specs);
  static Generator pure_death(int max_label);
  static Generator birth_death(int max_label, double birth_rate,
                               double death_rate_per_unit);
  static Generator zero(int max_label);
  static Generator from_matrix(int max_label, std::vector<double> entries);

  int max_label() const { return max_label_; }
  double rate(int to, int from) const {
    return entries_[static_cast<std::size_t>(to) * (max_label_ + 1) + from];
  }
  // Total outgoing rate from a state (= -diagonal entry).
  double exit_rate(int from) const { return -rate(from, from); }
  const std::vector<double>& entries() const { return entries_; }

 private:
  Generator(int max_label, std::vector<double> entries);
  void validate() const;
  int max_label_;
  std::vector<double> entries_;  // row-major, entries_[to][from]
};

// exp(L^T t) p0 by uniformization; nonnegative by construction.
Distribution forward_solve(const Generator& g, const Distribution& p0,
                           double t);

// One exact draw of X_t | X_0 = x0 (event-driven simulation).
int simulate_exact(const Generator& g, int x0, double t, Rng& rng);

struct ReverseTransition {
  int target;   // preimage state m' of a forward transition m' -> m
  double rate;  // nu(m') p_s[m'] / p_s[m]
};

// Reverse-time rates out of state m at a time where the forward law is p_s.
// One entry per forward in-edge of m. Throws if p_s[m] is (numerically) zero.
std::vector<ReverseTransition> reverse_rates(const Generator& g,
                                             const Distribution& p_s, int m);

// Unnormalized discrete score of the forward transition preimage -> m:
// nu(preimage) (p_s[preimage] - p_s[m]) / p_s[m].
double discrete_score(const Generator& g, const Distribution& p_s, int m,
                      int preimage);

// Max-norm residuals of the forward (dP/dt = L^T P) and backward
// (dP/dt = P L^T) Kolmogorov equations, by central differences on the matrix
// exponential at the given step.
std::pair<double, double> kolmogorov_residuals(const Generator& g, double t,
                                               double fd_step = 1e-4);

// Reverse-time path simulation by fine-grid tau-leaping from time t down to
// s, against the forward solution of p0 precomputed on the substep grid. The
// substep is chosen adaptively so max total reverse rate * dt <= max_rate_dt.
class ReverseSimulator {
 public:
  ReverseSimulator(const Generator& g, const Distribution& p0, double s,
                   double t, double max_rate_dt = 0.05);

  // Forward law at the start time t (for drawing terminal states).
  const Distribution& terminal_law() const { return grid_laws_.back(); }
  // Forward law at the end time s.
  const Distribution& initial_law() const { return grid_laws_.front(); }

  int run(int terminal_state, Rng& rng) const;
  int substeps() const { return static_cast<int>(grid_laws_.size()) - 1; }

 private:
  void build(const Generator& g, const Distribution& p0, double s, double t,
             int substeps);
  double dt_ = 0;
  std::vector<Distribution> grid_laws_;  // laws at s + j*dt, j = 0..substeps
  // rates_[j][m]: reverse transitions at grid time s + j*dt
  std::vector<std::vector<std::vector<ReverseTransition>>> rates_;
};

// Plain-text serialization: header "M=<int>" then M+1 rows of the matrix.
void save_generator(const Generator& g, const std::string& path);
Generator load_generator(const std::string& path);

}  // namespace blackout

#endif
