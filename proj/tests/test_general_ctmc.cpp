#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <vector>

#include "blackout/eval.hpp"
#include "blackout/general_ctmc.hpp"
#include "blackout/pure_death.hpp"
#include "doctest.h"

using namespace blackout;

TEST_CASE("generator assembly") {
  SUBCASE("pure-death via transition specs") {
    TransitionSpec death{1, -1, [](int m) { return static_cast<double>(m); }};
    const Generator a =
        Generator::from_transitions(8, std::span<const TransitionSpec>(&death, 1));
    const Generator b = Generator::pure_death(8);
    REQUIRE(a.entries().size() == b.entries().size());
    for (std::size_t i = 0; i < a.entries().size(); ++i)
      CHECK(a.entries()[i] == b.entries()[i]);
  }

  SUBCASE("empty transition list freezes the process") {
    const Generator g = Generator::from_transitions(4, {});
    for (double e : g.entries()) CHECK(e == 0.0);
  }

  SUBCASE("birth-death matches hand assembly on M=4") {
    const double lam = 2.0, mu = 0.5;
    const Generator g = Generator::birth_death(4, lam, mu);
    const int n = 5;
    std::vector<double> expected(n * n, 0.0);
    auto at = [&](int to, int from) -> double& { return expected[to * n + from]; };
    for (int m = 0; m < 4; ++m) {  // birth m -> m+1 (clipped at M)
      at(m + 1, m) += lam;
      at(m, m) -= lam;
    }
    for (int m = 1; m <= 4; ++m) {  // death m -> m-1
      at(m - 1, m) += mu * m;
      at(m, m) -= mu * m;
    }
    for (int to = 0; to < n; ++to)
      for (int from = 0; from < n; ++from)
        CHECK(g.rate(to, from) == doctest::Approx(at(to, from)).epsilon(1e-15));
  }

  SUBCASE("negative rate rejected") {
    TransitionSpec bad{1, +1, [](int) { return -1.0; }};
    CHECK_THROWS_AS(
        Generator::from_transitions(4, std::span<const TransitionSpec>(&bad, 1)),
        std::invalid_argument);
  }
}

TEST_CASE("distribution invariants") {
  CHECK_THROWS_AS(Distribution({0.5, -0.2, 0.7}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({0.5, 0.4}), std::invalid_argument);
  const Distribution d = Distribution::delta(2, 4);
  CHECK(d.probs[2] == 1.0);
  CHECK_THROWS_AS(Distribution::delta(5, 4), std::invalid_argument);
}

TEST_CASE("forward solve") {
  const Generator g = Generator::birth_death(8, 0.7, 1.3);
  const Distribution p0 = Distribution::delta(5, 8);

  SUBCASE("t=0 is the identity") {
    const auto p = forward_solve(g, p0, 0.0);
    for (int m = 0; m <= 8; ++m) CHECK(p.probs[m] == p0.probs[m]);
  }

  SUBCASE("semigroup property") {
    const auto direct = forward_solve(g, p0, 2.1);
    const auto composed = forward_solve(g, forward_solve(g, p0, 0.8), 1.3);
    for (int m = 0; m <= 8; ++m)
      CHECK(std::fabs(direct.probs[m] - composed.probs[m]) < 1e-9);
  }

  SUBCASE("nonnegative and normalized out to t=20") {
    for (double t : {0.01, 1.0, 5.0, 20.0}) {
      const auto p = forward_solve(g, p0, t);
      double sum = 0.0;
      for (double x : p.probs) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("exact simulation") {
  SUBCASE("zero generator never moves") {
    const Generator g = Generator::zero(6);
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) CHECK(simulate_exact(g, 4, 5.0, rng) == 4);
  }

  SUBCASE("pure-death empirical law vs closed form") {
    const Generator g = Generator::pure_death(8);
    const PureDeathLaw law(StateSpace(8, 1));
    Rng rng(17);
    const long draws = 100000;
    std::vector<int> ends(draws);
    for (long d = 0; d < draws; ++d) ends[d] = simulate_exact(g, 8, 1.0, rng);
    auto pmf = law.forward_pmf(8, 1.0);
    CHECK(tv_distance(ends, pmf) < 0.01);
  }

  SUBCASE("birth-death empirical law vs uniformization") {
    const Generator g = Generator::birth_death(8, 1.0, 1.0);
    Rng rng(23);
    const long draws = 100000;
    std::vector<int> ends(draws);
    for (long d = 0; d < draws; ++d) ends[d] = simulate_exact(g, 4, 1.5, rng);
    const auto p = forward_solve(g, Distribution::delta(4, 8), 1.5);
    CHECK(tv_distance(ends, p.probs) < 0.02);
  }
}

TEST_CASE("reverse rates") {
  const Generator g = Generator::pure_death(8);
  const PureDeathLaw law(StateSpace(8, 1));
  const double s = 0.6;
  auto pmf = law.forward_pmf(8, s);
  const Distribution p_s(std::move(pmf));

  SUBCASE("pure-death specialization") {
    for (int m = 0; m < 8; ++m) {
      const auto rts = reverse_rates(g, p_s, m);
      REQUIRE(rts.size() == 1);
      CHECK(rts[0].target == m + 1);
      CHECK(std::fabs(rts[0].rate - law.reverse_rate(8, m, s)) < 1e-12);
    }
  }

  SUBCASE("state without forward in-edges") {
    CHECK(reverse_rates(g, p_s, 8).empty());
  }

  SUBCASE("unreachable state") {
    const Distribution point = Distribution::delta(3, 8);
    CHECK_THROWS_AS(reverse_rates(g, point, 5), std::runtime_error);
  }
}

TEST_CASE("discrete score vanishes on a flat law") {
  const Generator g = Generator::birth_death(4, 1.4, 0.9);
  const Distribution uniform(std::vector<double>(5, 0.2));
  CHECK(discrete_score(g, uniform, 2, 1) == doctest::Approx(0.0));
  CHECK(discrete_score(g, uniform, 2, 3) == doctest::Approx(0.0));
  CHECK_THROWS_AS(discrete_score(g, uniform, 2, 0), std::invalid_argument);
}

TEST_CASE("kolmogorov residuals") {
  SUBCASE("zero generator") {
    const auto [rf, rb] = kolmogorov_residuals(Generator::zero(4), 1.0);
    CHECK(rf < 1e-12);
    CHECK(rb < 1e-12);
  }

  SUBCASE("pure-death M=8") {
    const auto [rf, rb] = kolmogorov_residuals(Generator::pure_death(8), 1.0);
    CHECK(rf < 1e-6);
    CHECK(rb < 1e-6);
  }

  SUBCASE("random generator M=8") {
    Rng rng(5);
    std::vector<TransitionSpec> specs;
    std::vector<double> up(9), down(9);
    for (int m = 0; m <= 8; ++m) {
      up[m] = rng.next_double();
      down[m] = rng.next_double() * m;
    }
    specs.push_back({2, +1, [up](int m) { return up[m]; }});
    specs.push_back({1, -1, [down](int m) { return down[m]; }});
    const Generator g = Generator::from_transitions(8, specs);
    const auto [rf, rb] = kolmogorov_residuals(g, 0.7);
    CHECK(rf < 1e-6);
    CHECK(rb < 1e-6);
  }
}

TEST_CASE("reverse simulator handles s == t") {
  const Generator g = Generator::pure_death(6);
  ReverseSimulator sim(g, Distribution::delta(6, 6), 0.8, 0.8);
  Rng rng(9);
  CHECK(sim.substeps() == 0);
  CHECK(sim.run(3, rng) == 3);
}

TEST_CASE("generator serialization round trip") {
  const Generator g = Generator::birth_death(5, 0.31, 1.07);
  const std::string path = "test_generator_roundtrip.txt";
  save_generator(g, path);
  const Generator back = load_generator(path);
  REQUIRE(back.max_label() == 5);
  for (std::size_t i = 0; i < g.entries().size(); ++i)
    CHECK(back.entries()[i] == g.entries()[i]);
  std::remove(path.c_str());
}
