#include "blackout/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "blackout/mathutil.hpp"

namespace blackout {

namespace {

constexpr std::uint64_t kTrainStream = 0x747261696eULL;  // stream tag

std::size_t sample_index(std::span<const double> weights, Rng& rng) {
  double u = rng.next_double();
  for (std::size_t j = 0; j < weights.size(); ++j) {
    u -= weights[j];
    if (u <= 0.0) return j;
  }
  return weights.size() - 1;
}

int sample_from(const Distribution& d, Rng& rng) {
  return static_cast<int>(sample_index(d.probs, rng));
}

// bridge thinning probability for the step t_k -> t_{k-1}
double bridge_r(const Schedule& sched, int k) {
  const double tk = sched.time(k);
  const double tkm1 = sched.time(k - 1);
  return std::min(1.0, (std::exp(-tkm1) - std::exp(-tk)) / (-std::expm1(-tk)));
}

long clip_round(double y, int x, int max_label) {
  const double c = std::clamp(y, 0.0, static_cast<double>(max_label - x));
  return std::lround(c);
}

void run_parallel(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

TrainResult train(const DiscreteDataset& ds, Mlp& mlp, const Schedule& sched,
                  const TrainConfig& cfg) {
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size < 1");
  if (cfg.iterations < 0) throw std::invalid_argument("train: iterations < 0");
  const StateSpace& space = ds.space;
  PureDeathLaw law(space);
  Rng rng = Rng::substream(cfg.seed, kTrainStream);
  SgdOptimizer opt(cfg.learning_rate, cfg.momentum);
  TrainResult result;
  result.loss_trace.reserve(cfg.iterations);

  std::vector<double> grad(mlp.params().size());
  for (long it = 0; it < cfg.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss_sum = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const auto& x0 = ds.items[sample_index(ds.weights, rng)];
      const int k = 1 + static_cast<int>(rng.next_below(sched.count()));
      const auto xt = law.sample_forward(x0, sched.time(k), rng);
      std::vector<long> target(space.dims);
      for (int i = 0; i < space.dims; ++i) target[i] = x0[i] - xt[i];
      const auto g = mlp_backprop(mlp, space, xt, k, target, cfg.loss, sched);
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];

      const auto y = mlp_predict(mlp, space, xt, k, sched);
      std::vector<double> terms(space.dims);
      for (int i = 0; i < space.dims; ++i)
        terms[i] = per_element_loss(cfg.loss, y[i], target[i], k, sched);
      loss_sum += stable_sum(terms) / space.dims;
    }
    for (double& g : grad) g /= cfg.batch_size;
    opt.step(mlp, grad);
    result.loss_trace.push_back(loss_sum / cfg.batch_size);
  }
  return result;
}

PredictFn oracle_predictor(const DiscreteDataset& ds, const Schedule& sched) {
  return [&ds, &sched](const std::vector<int>& xt, int k) {
    return oracle_predict(ds, xt, sched.time(k));
  };
}

PredictFn mlp_predictor(const Mlp& mlp, StateSpace space,
                        const Schedule& sched) {
  return [&mlp, space, &sched](const std::vector<int>& xt, int k) {
    return mlp_predict(mlp, space, xt, k, sched);
  };
}

std::vector<std::vector<int>> generate(const PredictFn& predictor,
                                       const StateSpace& space,
                                       const Schedule& sched,
                                       const GenConfig& cfg) {
  if (cfg.count < 1) throw std::invalid_argument("generate: count < 1");
  if (cfg.sampler == SamplerKind::TauLeapingGeneral)
    throw std::invalid_argument(
        "generate: use generate_tau_leaping for the general sampler");
  const int T = sched.count();
  std::vector<std::vector<int>> samples(cfg.count);

  auto one = [&](int s) {
    std::vector<int> x(space.dims, 0);  // blacked-out start
    for (int k = T; k >= 1; --k) {
      const auto y = predictor(x, k);
      if (cfg.sampler == SamplerKind::BinomialBridge) {
        const double r = bridge_r(sched, k);
        for (int i = 0; i < space.dims; ++i) {
          Rng rng = Rng::substream(cfg.seed, s, i, k);
          const long yi = clip_round(y[i], x[i], space.max_label);
          x[i] += static_cast<int>(sample_binomial(yi, r, rng));
        }
      } else {  // Poisson
        const double tk = sched.time(k);
        const double rate_factor = std::exp(-tk) / (-std::expm1(-tk));
        const double dt = cfg.poisson_verbatim_rate ? 1.0 : tk - sched.time(k - 1);
        for (int i = 0; i < space.dims; ++i) {
          Rng rng = Rng::substream(cfg.seed, s, i, k);
          const long yi = clip_round(y[i], x[i], space.max_label);
          const long d = sample_poisson(yi * rate_factor * dt, rng);
          x[i] = std::clamp(x[i] + static_cast<int>(d), 0, space.max_label);
        }
      }
    }
    samples[s] = std::move(x);
  };
  run_parallel(cfg.count, cfg.threads, one);
  return samples;
}

TrainResult train_general(const DiscreteDataset& ds, GeneralModel& model,
                          const Schedule& sched, const TrainConfig& cfg) {
  const StateSpace& space = ds.space;
  const int M = space.max_label;
  if (model.generator.max_label() != M)
    throw std::invalid_argument("train_general: generator size mismatch");
  const int R = static_cast<int>(model.transitions.size());
  if (R < 1 || static_cast<int>(model.rate_mlps.size()) != R)
    throw std::invalid_argument("train_general: need one predictor per transition");
  const int T = sched.count();

  // forward laws for every initial label at every observation time
  std::vector<std::vector<Distribution>> laws(T + 1);
  for (int k = 1; k <= T; ++k) {
    laws[k].reserve(M + 1);
    for (int o = 0; o <= M; ++o)
      laws[k].push_back(
          forward_solve(model.generator, Distribution::delta(o, M), sched.time(k)));
  }

  Rng rng = Rng::substream(cfg.seed, kTrainStream);
  std::vector<SgdOptimizer> opts(R, SgdOptimizer(cfg.learning_rate, cfg.momentum));
  TrainResult result;
  result.loss_trace.reserve(cfg.iterations);

  for (long it = 0; it < cfg.iterations; ++it) {
    const auto& x0 = ds.items[sample_index(ds.weights, rng)];
    const int k = 1 + static_cast<int>(rng.next_below(T));
    const int r = static_cast<int>(rng.next_below(R));
    const auto& spec = model.transitions[r];
    const double dt = sched.time(k) - sched.time(k - 1);
    const double wk = loss_weight(LossKind::GeneralInstantaneous, k, sched);

    Mlp& mlp = model.rate_mlps[r];
    std::vector<double> grad(mlp.params().size(), 0.0);
    std::vector<double> terms(space.dims);
    for (int i = 0; i < space.dims; ++i) {
      const Distribution& law = laws[k][x0[i]];
      const int m = sample_from(law, rng);
      // exact reverse rate of transition type r out of state m
      const int pre = m - spec.sign * spec.step;
      double lambda = 0.0;
      if (pre >= 0 && pre <= M && law.probs[m] > 0.0)
        lambda = model.generator.rate(m, pre) * law.probs[pre] / law.probs[m];

      const std::vector<int> state{m};
      const auto features = mlp_features(StateSpace(M, 1), state, k, sched);
      const double y = mlp.forward(features)[0];
      terms[i] = wk * dt * (y - (lambda > 0.0 ? lambda * std::log(y) : 0.0));
      const std::vector<double> dy{wk * dt * (1.0 - lambda / y) / space.dims};
      const auto g = mlp.backward(features, dy);
      for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += g[p];
    }
    opts[r].step(mlp, grad);
    result.loss_trace.push_back(stable_sum(terms) / space.dims);
  }
  return result;
}

std::vector<RatePredictFn> general_rate_predictors(const GeneralModel& model,
                                                   StateSpace space,
                                                   const Schedule& sched) {
  std::vector<RatePredictFn> fns;
  for (const auto& mlp : model.rate_mlps) {
    fns.push_back([&mlp, space, &sched](const std::vector<int>& xt, int k) {
      std::vector<double> rates(xt.size());
      for (std::size_t i = 0; i < xt.size(); ++i) {
        const std::vector<int> state{xt[i]};
        rates[i] =
            mlp.forward(mlp_features(StateSpace(space.max_label, 1), state, k, sched))[0];
      }
      return rates;
    });
  }
  return fns;
}

std::vector<int> reverse_displacements(const GeneralModel& model) {
  std::vector<int> disp;
  for (const auto& spec : model.transitions)
    disp.push_back(-spec.sign * spec.step);
  return disp;
}

std::vector<std::vector<int>> generate_tau_leaping(
    const std::vector<RatePredictFn>& rate_predictors,
    const std::vector<int>& displacements, const StateSpace& space,
    const Schedule& sched, const GenConfig& cfg,
    const std::vector<int>& initial_state) {
  if (rate_predictors.size() != displacements.size())
    throw std::invalid_argument("generate_tau_leaping: size mismatch");
  if (static_cast<int>(initial_state.size()) != space.dims)
    throw std::invalid_argument("generate_tau_leaping: bad initial state");
  const int T = sched.count();
  const int R = static_cast<int>(rate_predictors.size());
  std::vector<std::vector<int>> samples(cfg.count);

  auto one = [&](int s) {
    std::vector<int> x = initial_state;
    for (int k = T; k >= 1; --k) {
      const double dt = sched.time(k) - sched.time(k - 1);
      for (int r = 0; r < R; ++r) {
        const auto rates = rate_predictors[r](x, k);
        for (int i = 0; i < space.dims; ++i) {
          Rng rng = Rng::substream(cfg.seed, s, i,
                                   static_cast<std::uint64_t>(k) * R + r);
          const long c = sample_poisson(std::max(0.0, rates[i]) * dt, rng);
          x[i] = std::clamp(x[i] + static_cast<int>(c) * displacements[r], 0,
                            space.max_label);
        }
      }
    }
    samples[s] = std::move(x);
  };
  run_parallel(cfg.count, cfg.threads, one);
  return samples;
}

}  // namespace blackout
