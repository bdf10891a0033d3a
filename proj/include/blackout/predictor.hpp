#ifndef BLACKOUT_PREDICTOR_HPP
#define BLACKOUT_PREDICTOR_HPP

#include <span>
#include <string>
#include <vector>

#include "blackout/loss.hpp"
#include "blackout/pure_death.hpp"
#include "blackout/rng.hpp"
#include "blackout/schedule.hpp"

namespace blackout {

// Finite collection of state vectors with optional weights (normalized to 1).
struct DiscreteDataset {
  DiscreteDataset(StateSpace space, std::vector<std::vector<int>> items,
                  std::vector<double> weights = {});

  StateSpace space;
  std::vector<std::vector<int>> items;
  std::vector<double> weights;  // always populated, sums to 1
};

// Exact posterior mean E[X_0 - X_t | X_t = xt] under the binomial forward
// law, by Bayes over the dataset. Log-space likelihoods with log-sum-exp.
// Outputs are floored at a tiny positive value to honor the positivity
// contract shared with the trainable predictor.
std::vector<double> oracle_predict(const DiscreteDataset& ds,
                                   std::span<const int> xt, double t);

// Fully-connected net with tanh hidden layers and a softplus output, used as
// the trainable stand-in predictor of X_0 - X_t. Conditioned on time by
// appending t_k and e^{-t_k} to the (rescaled) state input.
class Mlp {
 public:
  // sizes = {input, hidden..., output}
  static Mlp create(std::vector<int> sizes, std::uint64_t seed);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }

  std::vector<double> forward(std::span<const double> input) const;

  // Parameters flattened layer by layer, weights then biases.
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Gradient of sum_i weight_i * output_i + d/dy terms supplied via
  // output_grad (dL/dy per output); returns dL/dparams.
  std::vector<double> backward(std::span<const double> input,
                               std::span<const double> output_grad) const;

  void save(const std::string& path) const;
  static Mlp load(const std::string& path);

 private:
  Mlp(std::vector<int> sizes, std::vector<double> params);
  std::vector<int> sizes_;
  std::vector<double> params_;
};

// Builds the MLP input features for a state vector at schedule index k:
// components rescaled by the label range, then t_k and e^{-t_k}.
std::vector<double> mlp_features(const StateSpace& space,
                                 std::span<const int> xt, int k,
                                 const Schedule& sched);

// Prediction with the blackout feature convention; strictly positive output.
std::vector<double> mlp_predict(const Mlp& mlp, const StateSpace& space,
                                std::span<const int> xt, int k,
                                const Schedule& sched);

// Gradient of the per-sample loss (mean over components of
// per_element_loss) with respect to the MLP parameters.
std::vector<double> mlp_backprop(const Mlp& mlp, const StateSpace& space,
                                 std::span<const int> xt, int k,
                                 std::span<const long> target, LossKind kind,
                                 const Schedule& sched);

// Plain SGD with optional momentum.
class SgdOptimizer {
 public:
  SgdOptimizer(double learning_rate, double momentum = 0.0)
      : lr_(learning_rate), momentum_(momentum) {}
  void step(Mlp& mlp, std::span<const double> grad);

 private:
  double lr_;
  double momentum_;
  std::vector<double> velocity_;
};

}  // namespace blackout

#endif
