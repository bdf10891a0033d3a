#include "blackout/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "blackout/mathutil.hpp"

namespace blackout {

namespace {
constexpr double kPositiveFloor = 1e-12;

double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace

DiscreteDataset::DiscreteDataset(StateSpace space_,
                                 std::vector<std::vector<int>> items_,
                                 std::vector<double> weights_)
    : space(space_), items(std::move(items_)), weights(std::move(weights_)) {
  if (items.empty()) throw std::invalid_argument("DiscreteDataset: empty");
  for (const auto& item : items) {
    if (static_cast<int>(item.size()) != space.dims)
      throw std::invalid_argument("DiscreteDataset: wrong dimension");
    for (int x : item)
      if (x < 0 || x > space.max_label)
        throw std::invalid_argument("DiscreteDataset: component out of range");
  }
  if (weights.empty()) {
    weights.assign(items.size(), 1.0 / items.size());
  } else {
    if (weights.size() != items.size())
      throw std::invalid_argument("DiscreteDataset: weight count mismatch");
    double sum = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("DiscreteDataset: negative weight");
      sum += w;
    }
    if (sum <= 0.0) throw std::invalid_argument("DiscreteDataset: zero weights");
    for (double& w : weights) w /= sum;
  }
}

std::vector<double> oracle_predict(const DiscreteDataset& ds,
                                   std::span<const int> xt, double t) {
  if (static_cast<int>(xt.size()) != ds.space.dims)
    throw std::invalid_argument("oracle_predict: wrong dimension");
  if (t < 0.0) throw std::invalid_argument("oracle_predict: negative time");
  const double q = std::exp(-t);
  const std::size_t j_count = ds.items.size();
  std::vector<double> logw(j_count);
  for (std::size_t j = 0; j < j_count; ++j) {
    double lw = ds.weights[j] > 0.0
                    ? std::log(ds.weights[j])
                    : -std::numeric_limits<double>::infinity();
    for (int i = 0; i < ds.space.dims; ++i)
      lw += log_binomial_pmf(xt[i], ds.items[j][i], q);
    logw[j] = lw;
  }
  const double lse = log_sum_exp(logw);
  if (!std::isfinite(lse))
    throw std::runtime_error("oracle_predict: all dataset items have zero likelihood");
  std::vector<double> pred(ds.space.dims, 0.0);
  for (std::size_t j = 0; j < j_count; ++j) {
    const double w = std::exp(logw[j] - lse);
    if (w == 0.0) continue;
    for (int i = 0; i < ds.space.dims; ++i)
      pred[i] += w * (ds.items[j][i] - xt[i]);
  }
  for (double& y : pred) y = std::max(y, kPositiveFloor);
  return pred;
}

Mlp::Mlp(std::vector<int> sizes, std::vector<double> params)
    : sizes_(std::move(sizes)), params_(std::move(params)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need >= 2 layers");
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1)
      throw std::invalid_argument("Mlp: bad layer size");
    n += static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l] + sizes_[l + 1];
  }
  if (params_.size() != n) throw std::invalid_argument("Mlp: bad param count");
  for (double p : params_)
    if (!std::isfinite(p)) throw std::invalid_argument("Mlp: non-finite param");
}

Mlp Mlp::create(std::vector<int> sizes, std::uint64_t seed) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
    n += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
  Rng rng(seed);
  std::vector<double> params(n);
  std::size_t idx = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
    const std::size_t w_count = static_cast<std::size_t>(sizes[l + 1]) * sizes[l];
    for (std::size_t i = 0; i < w_count; ++i)
      params[idx++] = (2.0 * rng.next_double() - 1.0) * scale;
    for (int i = 0; i < sizes[l + 1]; ++i) params[idx++] = 0.0;
  }
  return Mlp(std::move(sizes), std::move(params));
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_dim())
    throw std::invalid_argument("Mlp::forward: shape mismatch");
  std::vector<double> act(input.begin(), input.end());
  std::size_t idx = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    std::vector<double> z(out);
    for (int o = 0; o < out; ++o) {
      double s = 0.0;
      for (int i = 0; i < in; ++i) s += params_[idx + o * in + i] * act[i];
      z[o] = s;
    }
    idx += static_cast<std::size_t>(out) * in;
    for (int o = 0; o < out; ++o) z[o] += params_[idx + o];
    idx += out;
    const bool last = (l + 2 == sizes_.size());
    for (int o = 0; o < out; ++o)
      z[o] = last ? std::max(softplus(z[o]), kPositiveFloor) : std::tanh(z[o]);
    act = std::move(z);
  }
  return act;
}

std::vector<double> Mlp::backward(std::span<const double> input,
                                  std::span<const double> output_grad) const {
  if (static_cast<int>(input.size()) != input_dim() ||
      static_cast<int>(output_grad.size()) != output_dim())
    throw std::invalid_argument("Mlp::backward: shape mismatch");

  // forward pass, keeping pre-activations
  const std::size_t layers = sizes_.size() - 1;
  std::vector<std::vector<double>> acts(layers + 1);
  std::vector<std::vector<double>> zs(layers);
  acts[0].assign(input.begin(), input.end());
  std::size_t idx = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    zs[l].resize(out);
    for (int o = 0; o < out; ++o) {
      double s = params_[idx + static_cast<std::size_t>(out) * in + o];  // bias
      for (int i = 0; i < in; ++i) s += params_[idx + o * in + i] * acts[l][i];
      zs[l][o] = s;
    }
    acts[l + 1].resize(out);
    const bool last = (l + 1 == layers);
    for (int o = 0; o < out; ++o)
      acts[l + 1][o] = last ? softplus(zs[l][o]) : std::tanh(zs[l][o]);
    idx += static_cast<std::size_t>(out) * in + out;
  }

  std::vector<double> grad(params_.size(), 0.0);
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  // chain through the output softplus
  for (std::size_t o = 0; o < delta.size(); ++o)
    delta[o] *= sigmoid(zs[layers - 1][o]);

  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l], out = sizes_[l + 1];
    idx -= static_cast<std::size_t>(out) * in + out;
    for (int o = 0; o < out; ++o) {
      grad[idx + static_cast<std::size_t>(out) * in + o] = delta[o];
      for (int i = 0; i < in; ++i)
        grad[idx + o * in + i] = delta[o] * acts[l][i];
    }
    if (l > 0) {
      std::vector<double> prev(in, 0.0);
      for (int i = 0; i < in; ++i) {
        double s = 0.0;
        for (int o = 0; o < out; ++o) s += delta[o] * params_[idx + o * in + i];
        const double a = acts[l][i];
        prev[i] = s * (1.0 - a * a);  // tanh'
      }
      delta = std::move(prev);
    }
  }
  return grad;
}

void Mlp::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("Mlp::save: cannot open " + path);
  out << "MLP";
  for (int s : sizes_) out << ' ' << s;
  out << '\n';
  static_assert(sizeof(double) == 8);
  for (double p : params_) {
    std::uint64_t bits;
    std::memcpy(&bits, &p, 8);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = (bits >> (8 * i)) & 0xff;
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

Mlp Mlp::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("Mlp::load: cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "MLP") throw std::runtime_error("Mlp::load: bad header");
  std::vector<int> sizes;
  int s;
  while (hs >> s) sizes.push_back(s);
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
    n += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
  std::vector<double> params(n);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw std::runtime_error("Mlp::load: truncated file");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    std::memcpy(&params[i], &bits, 8);
  }
  return Mlp(std::move(sizes), std::move(params));
}

std::vector<double> mlp_features(const StateSpace& space,
                                 std::span<const int> xt, int k,
                                 const Schedule& sched) {
  if (static_cast<int>(xt.size()) != space.dims)
    throw std::invalid_argument("mlp_features: wrong dimension");
  std::vector<double> f;
  f.reserve(xt.size() + 2);
  for (int x : xt) f.push_back(static_cast<double>(x) / space.max_label);
  const double tk = sched.time(k);
  f.push_back(tk);
  f.push_back(std::exp(-tk));
  return f;
}

std::vector<double> mlp_predict(const Mlp& mlp, const StateSpace& space,
                                std::span<const int> xt, int k,
                                const Schedule& sched) {
  return mlp.forward(mlp_features(space, xt, k, sched));
}

std::vector<double> mlp_backprop(const Mlp& mlp, const StateSpace& space,
                                 std::span<const int> xt, int k,
                                 std::span<const long> target, LossKind kind,
                                 const Schedule& sched) {
  if (static_cast<int>(target.size()) != mlp.output_dim())
    throw std::invalid_argument("mlp_backprop: shape mismatch");
  const auto features = mlp_features(space, xt, k, sched);
  const auto y = mlp.forward(features);
  std::vector<double> dy(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    dy[i] = per_element_loss_grad(kind, y[i], target[i], k, sched) /
            static_cast<double>(y.size());
  return mlp.backward(features, dy);
}

void SgdOptimizer::step(Mlp& mlp, std::span<const double> grad) {
  auto& params = mlp.params();
  if (grad.size() != params.size())
    throw std::invalid_argument("SgdOptimizer: shape mismatch");
  if (momentum_ > 0.0) {
    if (velocity_.size() != params.size()) velocity_.assign(params.size(), 0.0);
    for (std::size_t i = 0; i < params.size(); ++i) {
      velocity_[i] = momentum_ * velocity_[i] - lr_ * grad[i];
      params[i] += velocity_[i];
    }
  } else {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
  }
}

}  // namespace blackout
