#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <vector>

#include "blackout/predictor.hpp"
#include "doctest.h"

using namespace blackout;

TEST_CASE("dataset validation") {
  const StateSpace space(8, 2);
  CHECK_THROWS_AS(DiscreteDataset(space, {}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDataset(space, {{1, 9}}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDataset(space, {{1, 2}}, {0.5, 0.5}),
                  std::invalid_argument);
  const DiscreteDataset ds(space, {{1, 2}, {3, 4}}, {1.0, 3.0});
  CHECK(ds.weights[0] == doctest::Approx(0.25));
  CHECK(ds.weights[1] == doctest::Approx(0.75));
}

TEST_CASE("oracle prediction") {
  const StateSpace space(8, 2);

  SUBCASE("singleton dataset is a point posterior") {
    const DiscreteDataset ds(space, {{7, 5}});
    const std::vector<int> xt{3, 0};
    const auto y = oracle_predict(ds, xt, 0.9);
    CHECK(y[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(5.0).epsilon(1e-12));
  }

  SUBCASE("deep corruption forgets the observation") {
    const DiscreteDataset ds(space, {{2, 8}, {6, 0}});
    const std::vector<int> xt{0, 0};
    const auto y = oracle_predict(ds, xt, 15.0);
    CHECK(y[0] == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(y[1] == doctest::Approx(4.0).epsilon(1e-6));
  }

  SUBCASE("zero-likelihood items drop out") {
    const DiscreteDataset ds(space, {{0, 0}, {8, 8}});
    const std::vector<int> xt{1, 0};
    const auto y = oracle_predict(ds, xt, 1.0);
    CHECK(y[0] == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(8.0).epsilon(1e-12));
  }

  SUBCASE("inconsistent observation") {
    const DiscreteDataset ds(space, {{1, 1}});
    const std::vector<int> xt{4, 0};
    CHECK_THROWS_AS(oracle_predict(ds, xt, 1.0), std::runtime_error);
  }
}

TEST_CASE("mlp forward") {
  const Schedule sched = Schedule::make(32, 15.0);
  const StateSpace space(8, 2);

  SUBCASE("zero weights give softplus of the bias") {
    Mlp mlp = Mlp::create({4, 3, 2}, 1);
    for (double& p : mlp.params()) p = 0.0;
    const std::vector<int> xt{5, 1};
    const auto y = mlp_predict(mlp, space, xt, 10, sched);
    for (double v : y) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }

  SUBCASE("outputs stay positive") {
    Rng rng(4);
    for (int rep = 0; rep < 200; ++rep) {
      Mlp mlp = Mlp::create({4, 6, 2}, rng.next_u64());
      const std::vector<int> xt{static_cast<int>(rng.next_below(9)),
                                static_cast<int>(rng.next_below(9))};
      const int k = 1 + static_cast<int>(rng.next_below(32));
      for (double v : mlp_predict(mlp, space, xt, k, sched)) CHECK(v > 0.0);
    }
  }

  SUBCASE("feature layout") {
    const std::vector<int> xt{4, 8};
    const auto f = mlp_features(space, xt, 5, sched);
    REQUIRE(f.size() == 4);
    CHECK(f[0] == doctest::Approx(0.5));
    CHECK(f[1] == doctest::Approx(1.0));
    CHECK(f[2] == doctest::Approx(sched.time(5)));
    CHECK(f[3] == doctest::Approx(std::exp(-sched.time(5))));
  }

  SUBCASE("shape mismatch") {
    Mlp mlp = Mlp::create({3, 3, 2}, 1);  // wants dims = 1
    const std::vector<int> xt{5, 1};
    CHECK_THROWS_AS(mlp_predict(mlp, space, xt, 10, sched),
                    std::invalid_argument);
  }
}

TEST_CASE("mlp gradients") {
  const Schedule sched = Schedule::make(32, 15.0);
  const StateSpace space(8, 2);

  SUBCASE("finite differences at three configurations") {
    struct Case {
      int k;
      std::vector<int> xt;
      std::vector<long> target;
    };
    const Case cases[] = {{3, {1, 2}, {0, 4}},
                          {16, {5, 5}, {3, 3}},
                          {30, {0, 8}, {8, 0}}};
    for (const auto& c : cases) {
      Mlp mlp = Mlp::create({4, 8, 2}, 77);
      const auto grad = mlp_backprop(mlp, space, c.xt, c.k,
                                     std::span<const long>(c.target),
                                     LossKind::FiniteTime, sched);
      auto loss_at = [&]() {
        const auto y = mlp_predict(mlp, space, c.xt, c.k, sched);
        double l = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
          l += per_element_loss(LossKind::FiniteTime, y[i], c.target[i], c.k,
                                sched);
        return l / static_cast<double>(y.size());
      };
      const double h = 1e-5;
      for (std::size_t p = 0; p < mlp.params().size(); p += 7) {
        const double orig = mlp.params()[p];
        mlp.params()[p] = orig + h;
        const double lp = loss_at();
        mlp.params()[p] = orig - h;
        const double lm = loss_at();
        mlp.params()[p] = orig;
        const double fd = (lp - lm) / (2.0 * h);
        CHECK(std::fabs(grad[p] - fd) <= 1e-5 * std::max(1e-3, std::fabs(fd)));
      }
    }
  }

  SUBCASE("gradient scales linearly with the loss weight") {
    Mlp mlp = Mlp::create({4, 8, 2}, 5);
    const std::vector<int> xt{2, 6};
    const std::vector<long> target{1, 2};
    const int k = 12;
    const auto g_inst = mlp_backprop(mlp, space, xt, k, target,
                                     LossKind::Instantaneous, sched);
    const auto g_fin = mlp_backprop(mlp, space, xt, k, target,
                                    LossKind::FiniteTime, sched);
    const double ratio = loss_weight(LossKind::Instantaneous, k, sched) /
                         loss_weight(LossKind::FiniteTime, k, sched);
    for (std::size_t p = 0; p < g_inst.size(); ++p)
      CHECK(std::fabs(g_inst[p] - ratio * g_fin[p]) <=
            1e-12 * std::max(1.0, std::fabs(g_inst[p])));
  }
}

TEST_CASE("mlp serialization round trip") {
  const std::string path = "test_mlp_roundtrip.bin";
  const Mlp mlp = Mlp::create({4, 8, 2}, 99);
  mlp.save(path);
  const Mlp back = Mlp::load(path);
  REQUIRE(back.sizes() == mlp.sizes());
  REQUIRE(back.params().size() == mlp.params().size());
  for (std::size_t i = 0; i < mlp.params().size(); ++i)
    CHECK(back.params()[i] == mlp.params()[i]);
  std::remove(path.c_str());
}

TEST_CASE("sgd optimizer") {
  Mlp mlp = Mlp::create({2, 2}, 1);
  const auto before = mlp.params();
  std::vector<double> grad(before.size(), 1.0);
  SgdOptimizer opt(0.1);
  opt.step(mlp, grad);
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(mlp.params()[i] == doctest::Approx(before[i] - 0.1));

  SgdOptimizer with_momentum(0.1, 0.9);
  Mlp m2 = Mlp::create({2, 2}, 1);
  const auto p0 = m2.params();
  with_momentum.step(m2, grad);
  with_momentum.step(m2, grad);
  // velocity after two steps: -0.1, then -0.19
  for (std::size_t i = 0; i < p0.size(); ++i)
    CHECK(m2.params()[i] == doctest::Approx(p0[i] - 0.29));
}
