#ifndef BLACKOUT_LOSS_HPP
#define BLACKOUT_LOSS_HPP

#include <span>

#include "blackout/schedule.hpp"

namespace blackout {

enum class LossKind {
  Instantaneous,         // weight (t_k - t_{k-1}) e^{-t_k}
  FiniteTime,            // weight e^{-t_{k-1}} - e^{-t_k}
  GeneralInstantaneous,  // weight (t_k - t_{k-1}) (1 - e^{-t_k})
};

// Schedule weight omega_k for the given loss kind.
double loss_weight(LossKind kind, int k, const Schedule& sched);

// omega_k (y - target log y); the log term vanishes identically at target 0.
// y must be positive (the predictor contract).
double per_element_loss(LossKind kind, double y, long target, int k,
                        const Schedule& sched);

// d/dy of per_element_loss.
double per_element_loss_grad(LossKind kind, double y, long target, int k,
                             const Schedule& sched);

// Mean of per-element losses over a batch; predictions and targets are
// flattened sample-major. k_indices holds one schedule index per sample.
double batch_loss(LossKind kind, std::span<const double> predictions,
                  std::span<const long> targets, std::span<const int> k_indices,
                  int dims, const Schedule& sched);

// Sum over transition types of dt (kappa - lambda log kappa).
double general_loss(std::span<const double> kappa,
                    std::span<const double> lambda, double dt);

}  // namespace blackout

#endif
