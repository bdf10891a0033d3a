#ifndef BLACKOUT_EVAL_HPP
#define BLACKOUT_EVAL_HPP

#include <span>
#include <vector>

#include "blackout/general_ctmc.hpp"
#include "blackout/pure_death.hpp"

namespace blackout {

enum class TvMode { Auto, Joint, Marginal };

// Half L1 distance between the empirical distributions of two sample sets.
// Joint histograms are used when the joint support fits in 2^20 cells
// (TvMode::Auto); otherwise the maximum over per-dimension marginals.
double tv_distance(std::span<const std::vector<int>> a,
                   std::span<const std::vector<int>> b, const StateSpace& space,
                   TvMode mode = TvMode::Auto);

// TV between one-dimensional samples and an analytic pmf over {0..len-1}.
double tv_distance(std::span<const int> samples, std::span<const double> pmf);

struct MomentReport {
  double mean_error;      // empirical mean - o e^{-t}
  double variance_error;  // empirical variance - o e^{-t}(1 - e^{-t})
};

// Compares empirical moments of forward samples against the binomial moments.
MomentReport moment_report(std::span<const int> samples, int o, double t);

// TV between the reverse-simulated law at s (tau-leaping against the exact
// forward solution, conditioned on X_0 = o) and the forward law at s.
double reverse_consistency_report(const Generator& g, int o, double s, double t,
                                  long paths, std::uint64_t seed);

}  // namespace blackout

#endif
