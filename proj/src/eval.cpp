#include "blackout/eval.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace blackout {

namespace {

std::uint64_t joint_cells(const StateSpace& space) {
  std::uint64_t cells = 1;
  for (int i = 0; i < space.dims; ++i) {
    cells *= static_cast<std::uint64_t>(space.max_label) + 1;
    if (cells > (1ULL << 20)) return 0;  // too large to enumerate
  }
  return cells;
}

std::uint64_t joint_index(std::span<const int> x, const StateSpace& space) {
  std::uint64_t idx = 0;
  for (int v : x) idx = idx * (space.max_label + 1) + static_cast<std::uint64_t>(v);
  return idx;
}

double tv_of_counts(const std::unordered_map<std::uint64_t, double>& pa,
                    const std::unordered_map<std::uint64_t, double>& pb) {
  double tv = 0.0;
  for (const auto& [cell, p] : pa) {
    auto it = pb.find(cell);
    tv += std::fabs(p - (it == pb.end() ? 0.0 : it->second));
  }
  for (const auto& [cell, p] : pb)
    if (!pa.count(cell)) tv += p;
  return 0.5 * tv;
}

}  // namespace

double tv_distance(std::span<const std::vector<int>> a,
                   std::span<const std::vector<int>> b, const StateSpace& space,
                   TvMode mode) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("tv_distance: empty sample set");
  bool joint = mode == TvMode::Joint ||
               (mode == TvMode::Auto && joint_cells(space) > 0);
  if (joint) {
    std::unordered_map<std::uint64_t, double> pa, pb;
    for (const auto& x : a) pa[joint_index(x, space)] += 1.0 / a.size();
    for (const auto& x : b) pb[joint_index(x, space)] += 1.0 / b.size();
    return tv_of_counts(pa, pb);
  }
  double worst = 0.0;
  for (int i = 0; i < space.dims; ++i) {
    std::vector<double> ca(space.max_label + 1, 0.0), cb(space.max_label + 1, 0.0);
    for (const auto& x : a) ca[x[i]] += 1.0 / a.size();
    for (const auto& x : b) cb[x[i]] += 1.0 / b.size();
    double tv = 0.0;
    for (int m = 0; m <= space.max_label; ++m) tv += std::fabs(ca[m] - cb[m]);
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

double tv_distance(std::span<const int> samples, std::span<const double> pmf) {
  if (samples.empty()) throw std::invalid_argument("tv_distance: empty sample set");
  std::vector<double> emp(pmf.size(), 0.0);
  for (int s : samples) {
    if (s < 0 || s >= static_cast<int>(pmf.size()))
      throw std::invalid_argument("tv_distance: sample outside pmf support");
    emp[s] += 1.0 / samples.size();
  }
  double tv = 0.0;
  for (std::size_t m = 0; m < pmf.size(); ++m) tv += std::fabs(emp[m] - pmf[m]);
  return 0.5 * tv;
}

MomentReport moment_report(std::span<const int> samples, int o, double t) {
  if (samples.empty()) throw std::invalid_argument("moment_report: empty input");
  double mean = 0.0;
  for (int s : samples) mean += s;
  mean /= samples.size();
  double var = 0.0;
  for (int s : samples) var += (s - mean) * (s - mean);
  var /= samples.size();
  const double q = std::exp(-t);
  return {mean - o * q, var - o * q * (1.0 - q)};
}

double reverse_consistency_report(const Generator& g, int o, double s, double t,
                                  long paths, std::uint64_t seed) {
  if (!(s <= t)) throw std::invalid_argument("reverse_consistency_report: s > t");
  if (paths < 1) throw std::invalid_argument("reverse_consistency_report: paths < 1");
  ReverseSimulator sim(g, Distribution::delta(o, g.max_label()), s, t);
  const Distribution& target = sim.initial_law();
  std::vector<int> ends(paths);
  for (long p = 0; p < paths; ++p) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(p));
    // draw terminal state from the forward law at t
    double u = rng.next_double();
    int terminal = g.max_label();
    for (int m = 0; m <= g.max_label(); ++m) {
      u -= sim.terminal_law().probs[m];
      if (u <= 0.0) {
        terminal = m;
        break;
      }
    }
    ends[p] = sim.run(terminal, rng);
  }
  return tv_distance(ends, target.probs);
}

}  // namespace blackout
