#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "blackout/schedule.hpp"
#include "doctest.h"

using namespace blackout;

TEST_CASE("fisher density") {
  CHECK(fisher_density(std::log(2.0)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fisher_density(40.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(fisher_density(0.0), std::invalid_argument);
  CHECK_THROWS_AS(fisher_density(-1.0), std::invalid_argument);

  // in q = e^{-t} coordinates the density is 1/(q(1-q)), symmetric about 1/2
  for (double q : {0.1, 0.25, 0.4}) {
    const double lhs = fisher_density(-std::log(q)) / q;        // |dt/dq| = 1/q
    const double rhs = fisher_density(-std::log(1.0 - q)) / (1.0 - q);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(lhs == doctest::Approx(1.0 / (q * (1.0 - q))).epsilon(1e-12));
  }
}

TEST_CASE("schedule construction") {
  const int T = 1000;
  const double horizon = 15.0;
  const Schedule sched = Schedule::make(T, horizon);

  SUBCASE("endpoints") {
    CHECK(sched.time(0) == 0.0);
    CHECK(sched.time(T) == horizon);
    const double t1 = -std::log(-std::expm1(-horizon));
    CHECK(std::fabs(sched.time(1) - t1) < 1e-12);
    CHECK(sched.time(1) == doctest::Approx(3.059e-7).epsilon(1e-3));
  }

  SUBCASE("strictly increasing") {
    for (int k = 1; k < T; ++k) CHECK(sched.time(k + 1) > sched.time(k));
  }

  SUBCASE("logit-space uniformity") {
    auto logit_q = [](double t) { return -t - std::log(-std::expm1(-t)); };
    const double step = logit_q(sched.time(2)) - logit_q(sched.time(1));
    for (int k = 2; k < T; ++k)
      CHECK(std::fabs(logit_q(sched.time(k + 1)) - logit_q(sched.time(k)) -
                      step) < 1e-12);
  }

  SUBCASE("reflection identity") {
    for (int k = 1; k <= T; ++k)
      CHECK(std::fabs(std::exp(-sched.time(k)) +
                      std::exp(-sched.time(T + 1 - k)) - 1.0) < 1e-12);
  }

  SUBCASE("half the times straddle log 2") {
    int below = 0;
    for (int k = 1; k <= T; ++k)
      if (sched.time(k) < std::log(2.0)) ++below;
    CHECK(below == T / 2);
  }

  SUBCASE("domain errors") {
    CHECK_THROWS_AS(Schedule::make(1, 15.0), std::invalid_argument);
    CHECK_THROWS_AS(Schedule::make(10, std::log(2.0)), std::invalid_argument);
    CHECK_THROWS_AS(sched.time(-1), std::invalid_argument);
    CHECK_THROWS_AS(sched.time(T + 1), std::invalid_argument);
  }
}
