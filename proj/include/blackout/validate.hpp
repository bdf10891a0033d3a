#ifndef BLACKOUT_VALIDATE_HPP
#define BLACKOUT_VALIDATE_HPP

#include <string>
#include <vector>

#include "blackout/general_ctmc.hpp"

namespace blackout {

// Dense exp(A t) by Taylor series with scaling and squaring; row-major n x n.
// Independent of the uniformization path in forward_solve, so the two can
// cross-check each other.
std::vector<double> dense_expm(const std::vector<double>& a, int n, double t);

struct CheckRow {
  std::string name;
  double value;      // measured error (or gap)
  double tolerance;  // pass iff value <= tolerance
  bool pass() const { return value <= tolerance; }
};

// Bridge pmf vs the conditional-Bayes construction from matrix exponentials.
// Conditionings whose terminal probability falls below the oracle's
// double-precision resolution (1e-6) are skipped; the row reports coverage.
std::vector<CheckRow> validate_bridge(int max_label);

// Closed-form forward pmf vs uniformization, plus reverse-path consistency
// for pure-death and birth-death chains.
std::vector<CheckRow> validate_forward(int max_label);
std::vector<CheckRow> validate_reverse(int max_label, long paths,
                                       std::uint64_t seed);

std::vector<CheckRow> validate_schedule();
std::vector<CheckRow> validate_loss();
std::vector<CheckRow> validate_score(int max_label);

}  // namespace blackout

#endif
