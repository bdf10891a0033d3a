#include "blackout/validate.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "blackout/eval.hpp"
#include "blackout/loss.hpp"
#include "blackout/predictor.hpp"
#include "blackout/pure_death.hpp"
#include "blackout/schedule.hpp"

namespace blackout {

namespace {

std::vector<double> mat_mul(const std::vector<double>& a,
                            const std::vector<double>& b, int n) {
  std::vector<double> c(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = a[static_cast<std::size_t>(i) * n + k];
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j)
        c[static_cast<std::size_t>(i) * n + j] +=
            aik * b[static_cast<std::size_t>(k) * n + j];
    }
  return c;
}

}  // namespace

std::vector<double> dense_expm(const std::vector<double>& a, int n, double t) {
  if (static_cast<int>(a.size()) != n * n)
    throw std::invalid_argument("dense_expm: bad size");
  std::vector<double> at(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) at[i] = a[i] * t;

  double norm = 0.0;  // inf-norm
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::fabs(at[static_cast<std::size_t>(i) * n + j]);
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (double& x : at) x *= scale;

  // Taylor series of the scaled matrix
  std::vector<double> result(at.size(), 0.0);
  for (int i = 0; i < n; ++i) result[static_cast<std::size_t>(i) * n + i] = 1.0;
  std::vector<double> term = result;
  for (int k = 1; k <= 40; ++k) {
    term = mat_mul(term, at, n);
    for (double& x : term) x /= k;
    double tn = 0.0;
    for (double x : term) tn = std::max(tn, std::fabs(x));
    for (std::size_t i = 0; i < result.size(); ++i) result[i] += term[i];
    if (tn < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = mat_mul(result, result, n);
  return result;
}

namespace {

// L^T of the given generator, row-major: entry [m][m'] = rate m' -> m.
std::vector<double> generator_matrix(const Generator& g) {
  return g.entries();
}

}  // namespace

std::vector<CheckRow> validate_bridge(int max_label) {
  const PureDeathLaw law(StateSpace(max_label, 1));
  const Generator g = Generator::pure_death(max_label);
  const auto lmat = generator_matrix(g);
  const int n = max_label + 1;
  const double resolvable = 1e-6;

  const std::pair<double, double> time_pairs[8] = {
      {0.05, 0.2}, {0.1, 0.5},        {0.3, 1.5}, {std::log(2.0), 2.0},
      {0.5, 1.0},  {std::log(2.0), 20.0}, {1.0, 3.0}, {0.25, 0.6}};

  double max_err = 0.0;
  long checked = 0, skipped = 0;
  for (const auto& [s, t] : time_pairs) {
    const auto es = dense_expm(lmat, n, s);       // p(m,s|o,0) = es[m][o]
    const auto ets = dense_expm(lmat, n, t - s);  // p(n,t|m,s) = ets[n][m]
    const auto et = dense_expm(lmat, n, t);       // p(n,t|o,0) = et[n][o]
    for (int o = 0; o <= max_label; ++o) {
      for (int nn = 0; nn <= o; ++nn) {
        const double den = et[static_cast<std::size_t>(nn) * n + o];
        if (den < resolvable) {
          ++skipped;
          continue;
        }
        const auto pmf = law.bridge_pmf(BridgeParams(o, nn, s, t));
        for (int m = nn; m <= o; ++m) {
          const double bayes =
              ets[static_cast<std::size_t>(nn) * n + m] *
              es[static_cast<std::size_t>(m) * n + o] / den;
          max_err = std::max(max_err, std::fabs(pmf[m - nn] - bayes));
        }
        ++checked;
      }
    }
  }
  const double coverage = static_cast<double>(checked) / (checked + skipped);
  return {
      {"bridge_bayes_max_abs_err", max_err, 1e-10},
      {"bridge_bayes_coverage_gap", 1.0 - coverage, 0.5},
  };
}

std::vector<CheckRow> validate_forward(int max_label) {
  const PureDeathLaw law(StateSpace(max_label, 1));
  const Generator g = Generator::pure_death(max_label);
  const double times[] = {0.01, std::log(2.0), 1.0, 5.0, 15.0};
  double max_err = 0.0;
  for (double t : times) {
    for (int o = 0; o <= max_label; ++o) {
      const auto closed = law.forward_pmf(o, t);
      const auto numeric =
          forward_solve(g, Distribution::delta(o, max_label), t);
      for (int m = 0; m <= o; ++m)
        max_err = std::max(max_err, std::fabs(closed[m] - numeric.probs[m]));
      for (int m = o + 1; m <= max_label; ++m)
        max_err = std::max(max_err, std::fabs(numeric.probs[m]));
    }
  }
  return {{"forward_closed_vs_uniformization_max_abs_err", max_err, 1e-9}};
}

std::vector<CheckRow> validate_reverse(int max_label, long paths,
                                       std::uint64_t seed) {
  const Generator pd = Generator::pure_death(max_label);
  const double tv_pd = reverse_consistency_report(pd, /*o=*/max_label, 0.3, 1.5,
                                                  paths, seed);
  const Generator bd = Generator::birth_death(max_label, 1.0, 1.0);
  const double tv_bd = reverse_consistency_report(bd, /*o=*/max_label / 2, 0.3,
                                                  1.5, paths, seed + 1);
  return {
      {"reverse_consistency_pure_death_tv", tv_pd, 0.02},
      {"reverse_consistency_birth_death_tv", tv_bd, 0.02},
  };
}

std::vector<CheckRow> validate_schedule() {
  const int T = 1000;
  const double horizon = 15.0;
  const Schedule sched = Schedule::make(T, horizon);

  // uniformity of Logit(e^{-t_k})
  auto logit_q = [](double t) {
    return -t - std::log(-std::expm1(-t));
  };
  double uniformity = 0.0;
  const double step0 = logit_q(sched.time(2)) - logit_q(sched.time(1));
  for (int k = 2; k < T; ++k)
    uniformity = std::max(
        uniformity,
        std::fabs(logit_q(sched.time(k + 1)) - logit_q(sched.time(k)) - step0));

  double reflection = 0.0;
  for (int k = 1; k <= T; ++k)
    reflection = std::max(reflection,
                          std::fabs(std::exp(-sched.time(k)) +
                                    std::exp(-sched.time(T + 1 - k)) - 1.0));

  const double t1_expected = -std::log(-std::expm1(-horizon));
  const double t1_err = std::fabs(sched.time(1) - t1_expected);

  // terminal blackout mass from o = 255
  const PureDeathLaw law(StateSpace(255, 1));
  const double p0 = law.forward_pmf(255, horizon)[0];

  return {
      {"schedule_logit_uniformity", uniformity, 1e-12},
      {"schedule_reflection_identity", reflection, 1e-12},
      {"schedule_t1_endpoint_err", t1_err, 1e-12},
      {"schedule_blackout_mass_gap", 1.0 - p0, 1e-4},
  };
}

std::vector<CheckRow> validate_loss() {
  const Schedule sched = Schedule::make(64, 15.0);

  // argmin of y - c log y is y = c; the loss is convex, so bisect on the
  // sign of a central-difference slope (loss values only, bias ~ h^2/(3c))
  double argmin_err = 0.0;
  for (long target = 1; target <= 32; ++target) {
    auto f = [&](double y) {
      return per_element_loss(LossKind::FiniteTime, y, target, 10, sched);
    };
    const double h = 1e-4;
    auto slope = [&](double y) { return f(y + h) - f(y - h); };
    double a = 0.25, b = 2.0 * target + 2.0;
    while (b - a > 1e-9) {
      const double mid = 0.5 * (a + b);
      (slope(mid) > 0.0 ? b : a) = mid;
    }
    argmin_err = std::max(argmin_err, std::fabs(0.5 * (a + b) - target));
  }

  // FiniteTime/Instantaneous weight ratio -> 1 as the step shrinks
  const double tk = 1.0, delta = 1e-4;
  const double w_fin = std::exp(-(tk - delta)) - std::exp(-tk);
  const double w_inst = delta * std::exp(-tk);
  const double ratio_gap = std::fabs(w_fin / w_inst - 1.0);

  // backprop vs central finite differences
  const StateSpace space(8, 2);
  Mlp mlp = Mlp::create({4, 8, 2}, 42);
  const std::vector<int> xt{3, 5};
  const std::vector<long> target{2, 1};
  const int k = 20;
  const auto grad =
      mlp_backprop(mlp, space, xt, k, target, LossKind::FiniteTime, sched);
  auto loss_at = [&]() {
    const auto y = mlp_predict(mlp, space, xt, k, sched);
    double l = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
      l += per_element_loss(LossKind::FiniteTime, y[i], target[i], k, sched);
    return l / static_cast<double>(y.size());
  };
  double fd_rel = 0.0;
  const double h = 1e-5;
  for (std::size_t p = 0; p < mlp.params().size(); ++p) {
    const double orig = mlp.params()[p];
    mlp.params()[p] = orig + h;
    const double lp = loss_at();
    mlp.params()[p] = orig - h;
    const double lm = loss_at();
    mlp.params()[p] = orig;
    const double fd = (lp - lm) / (2.0 * h);
    const double denom = std::max(std::fabs(fd), 1e-6);
    fd_rel = std::max(fd_rel, std::fabs(grad[p] - fd) / denom);
  }

  return {
      {"loss_argmin_err", argmin_err, 1e-6},
      {"loss_weight_ratio_gap", ratio_gap, 1e-4},
      {"loss_backprop_fd_rel_err", fd_rel, 1e-5},
  };
}

std::vector<CheckRow> validate_score(int max_label) {
  // specialization: pure-death closed form vs general discrete score
  const PureDeathLaw law(StateSpace(max_label, 1));
  const Generator g = Generator::pure_death(max_label);
  const double times[] = {0.5, std::log(2.0), 1.0, 2.0, 3.0};
  double spec_err = 0.0;
  for (double t : times) {
    for (int o = 0; o <= max_label; ++o) {
      // exact forward law, padded to the full state space
      auto pmf = law.forward_pmf(o, t);
      pmf.resize(max_label + 1, 0.0);
      const Distribution p(std::move(pmf));
      for (int m = 0; m < o; ++m) {
        if (p.probs[m] < 1e-250) continue;
        const double general = discrete_score(g, p, m, m + 1);
        const double closed = (m + 1.0) * law.score(o, m, t);
        spec_err = std::max(spec_err, std::fabs(general - closed));
      }
    }
  }

  // Gaussian limit: score ~ o e^{-t} * difference of log of the matched
  // Gaussian, away from the zero crossing at the mode
  const int o = 256;
  const double t = 1.0;
  const double q = std::exp(-t);
  const double mu = o * q, var = o * q * (1.0 - q), sd = std::sqrt(var);
  const PureDeathLaw big(StateSpace(256, 1));
  double gauss_rel = 0.0;
  for (int m = static_cast<int>(mu - 2 * sd); m <= static_cast<int>(mu + 2 * sd);
       ++m) {
    if (std::fabs(m - mu) < sd / 2.0) continue;
    const double s_dis = (m + 1.0) * big.score(o, m, t);
    const double dlog = (-(m + 1 - mu) * (m + 1 - mu) + (m - mu) * (m - mu)) /
                        (2.0 * var);
    const double approx = o * q * dlog;
    gauss_rel = std::max(gauss_rel, std::fabs(s_dis / approx - 1.0));
  }

  return {
      {"score_specialization_max_abs_err", spec_err, 1e-12},
      {"score_gaussian_limit_rel_err", gauss_rel, 0.05},
  };
}

}  // namespace blackout
