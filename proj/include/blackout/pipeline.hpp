#ifndef BLACKOUT_PIPELINE_HPP
#define BLACKOUT_PIPELINE_HPP

#include <functional>
#include <vector>

#include "blackout/general_ctmc.hpp"
#include "blackout/loss.hpp"
#include "blackout/predictor.hpp"
#include "blackout/pure_death.hpp"
#include "blackout/rng.hpp"
#include "blackout/schedule.hpp"

namespace blackout {

struct TrainConfig {
  LossKind loss = LossKind::FiniteTime;
  int batch_size = 1;
  long iterations = 1000;
  double learning_rate = 1e-2;
  double momentum = 0.0;
  std::uint64_t seed = 0;
};

struct TrainResult {
  std::vector<double> loss_trace;  // one value per iteration
};

// Trains the count predictor: corrupt a dataset draw element-wise with the
// binomial forward law at a uniformly drawn schedule index, then take a
// weighted-likelihood gradient step.
TrainResult train(const DiscreteDataset& ds, Mlp& mlp, const Schedule& sched,
                  const TrainConfig& cfg);

enum class SamplerKind { BinomialBridge, Poisson, TauLeapingGeneral };

struct GenConfig {
  SamplerKind sampler = SamplerKind::BinomialBridge;
  int count = 1;
  std::uint64_t seed = 0;
  // Poisson branch: the default scales the jump rate by t_k - t_{k-1} so the
  // mean matches the instantaneous rate integrated over the step; this flag
  // drops that factor (the rate as printed, with no time-step scaling).
  bool poisson_verbatim_rate = false;
  int threads = 1;
};

// Predictor interface for generation: (state, schedule index) -> positive
// per-dimension prediction of X_0 - X_t.
using PredictFn =
    std::function<std::vector<double>(const std::vector<int>&, int)>;

PredictFn oracle_predictor(const DiscreteDataset& ds, const Schedule& sched);
PredictFn mlp_predictor(const Mlp& mlp, StateSpace space, const Schedule& sched);

// Reverse generation from the all-zero state, stepping k = T..1 with the
// binomial-bridge or Poisson jump rule. Deterministic per (seed, sample,
// dimension, step) RNG substreams.
std::vector<std::vector<int>> generate(const PredictFn& predictor,
                                       const StateSpace& space,
                                       const Schedule& sched,
                                       const GenConfig& cfg);

// Per-transition rate predictor for the general pipeline.
using RatePredictFn =
    std::function<std::vector<double>(const std::vector<int>&, int)>;

struct GeneralModel {
  Generator generator;
  std::vector<TransitionSpec> transitions;  // transition types, index r
  std::vector<Mlp> rate_mlps;               // one per transition type
};

// Trains per-transition reverse-rate predictors against the exact reverse
// rates computed from the forward solution.
TrainResult train_general(const DiscreteDataset& ds, GeneralModel& model,
                          const Schedule& sched, const TrainConfig& cfg);

// Tau-leaping generation for an arbitrary process: per transition type r,
// counts ~ Poisson(rate * (t_k - t_{k-1})), applied as the reverse of the
// forward displacement and clipped to the state space.
std::vector<std::vector<int>> generate_tau_leaping(
    const std::vector<RatePredictFn>& rate_predictors,
    const std::vector<int>& reverse_displacements, const StateSpace& space,
    const Schedule& sched, const GenConfig& cfg,
    const std::vector<int>& initial_state);

// Rate predictors and displacements for a trained GeneralModel.
std::vector<RatePredictFn> general_rate_predictors(const GeneralModel& model,
                                                   StateSpace space,
                                                   const Schedule& sched);
std::vector<int> reverse_displacements(const GeneralModel& model);

}  // namespace blackout

#endif
