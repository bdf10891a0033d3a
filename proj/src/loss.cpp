#include "blackout/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "blackout/mathutil.hpp"

namespace blackout {

double loss_weight(LossKind kind, int k, const Schedule& sched) {
  if (k < 1 || k > sched.count())
    throw std::invalid_argument("loss_weight: bad schedule index");
  const double tk = sched.time(k);
  const double tkm1 = sched.time(k - 1);
  switch (kind) {
    case LossKind::Instantaneous:
      return (tk - tkm1) * std::exp(-tk);
    case LossKind::FiniteTime:
      return std::exp(-tkm1) - std::exp(-tk);
    case LossKind::GeneralInstantaneous:
      return (tk - tkm1) * (-std::expm1(-tk));
  }
  throw std::invalid_argument("loss_weight: unknown kind");
}

double per_element_loss(LossKind kind, double y, long target, int k,
                        const Schedule& sched) {
  if (!(y > 0.0)) throw std::invalid_argument("per_element_loss: need y > 0");
  if (target < 0) throw std::invalid_argument("per_element_loss: target < 0");
  const double w = loss_weight(kind, k, sched);
  double l = y;
  if (target > 0) l -= target * std::log(y);
  return w * l;
}

double per_element_loss_grad(LossKind kind, double y, long target, int k,
                             const Schedule& sched) {
  if (!(y > 0.0)) throw std::invalid_argument("per_element_loss_grad: need y > 0");
  const double w = loss_weight(kind, k, sched);
  return w * (1.0 - static_cast<double>(target) / y);
}

double batch_loss(LossKind kind, std::span<const double> predictions,
                  std::span<const long> targets, std::span<const int> k_indices,
                  int dims, const Schedule& sched) {
  if (predictions.size() != targets.size())
    throw std::invalid_argument("batch_loss: shape mismatch");
  if (dims < 1 || predictions.size() % dims != 0 ||
      predictions.size() / dims != k_indices.size())
    throw std::invalid_argument("batch_loss: shape mismatch");
  std::vector<double> terms(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i)
    terms[i] = per_element_loss(kind, predictions[i], targets[i],
                                k_indices[i / dims], sched);
  return stable_sum(terms) / static_cast<double>(terms.size());
}

double general_loss(std::span<const double> kappa,
                    std::span<const double> lambda, double dt) {
  if (kappa.size() != lambda.size())
    throw std::invalid_argument("general_loss: shape mismatch");
  double sum = 0.0;
  for (std::size_t r = 0; r < kappa.size(); ++r) {
    if (!(kappa[r] > 0.0))
      throw std::invalid_argument("general_loss: need kappa > 0");
    if (lambda[r] < 0.0)
      throw std::invalid_argument("general_loss: negative lambda");
    double term = kappa[r];
    if (lambda[r] > 0.0) term -= lambda[r] * std::log(kappa[r]);
    sum += dt * term;
  }
  return sum;
}

}  // namespace blackout
