#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "fkklab/fkk.hpp"

using namespace fkk;

namespace {

/// Independent oracle: fixed-point iteration of the raw expectation
/// E(j) = sum_k alpha_k(j) [1/lambda + (k>0)(E(k) + E(j))], started from 0.
/// Equivalent to depth-truncated enumeration of order sequences.
std::vector<double> value_iteration(const AlphaTable& alpha, double lambda,
                                    int sweeps = 20000) {
  const int n = alpha.max_step();
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  for (int s = 0; s < sweeps; ++s)
    for (int j = 1; j <= n; ++j) {
      double v = 1.0 / lambda;
      for (int k = 1; k < j; ++k)
        v += alpha.alpha(j, k) *
             (e[static_cast<std::size_t>(k - 1)] +
              e[static_cast<std::size_t>(j - 1)]);
      e[static_cast<std::size_t>(j - 1)] = v;
    }
  return e;
}

/// Direct summation of the closed form's geometric series.
double naive_equilibrium(int h, double theta_p, double lambda) {
  const double r = theta_p / (1.0 - theta_p);
  double s = 0.0;
  for (int k = 1; k <= h - 1; ++k) s += std::pow(r, k);
  return (1.0 + 2.0 * s) / lambda;
}

}  // namespace

TEST_CASE("all-market book waits exactly one arrival") {
  const auto t = waiting_time_recursion(AlphaTable::all_market(6), 2.0);
  REQUIRE(t.size() == 6);
  for (double v : t) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("recursion matches the value-iteration oracle on random tables") {
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> rows;
    for (int j = 1; j <= 5; ++j) {
      std::vector<double> row(static_cast<std::size_t>(j));
      double sum = 0.0;
      for (double& x : row) sum += (x = u(gen));
      row[0] += 0.5 * sum;  // keep alpha_0 bounded away from 0
      sum += 0.5 * sum;
      for (double& x : row) x /= sum;
      rows.push_back(row);
    }
    const AlphaTable alpha(rows);
    const double lambda = u(gen) + 0.2;
    const auto direct = waiting_time_recursion(alpha, lambda);
    const auto oracle = value_iteration(alpha, lambda);
    for (std::size_t j = 0; j < direct.size(); ++j)
      CHECK(std::abs(direct[j] - oracle[j]) <= 1e-10);
  }
}

TEST_CASE("recursion rejects a non-executable book") {
  std::vector<std::vector<double>> rows = {{1.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(waiting_time_recursion(AlphaTable(rows), 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(waiting_time_recursion(AlphaTable::all_market(3), 0.0),
                  std::domain_error);
}

TEST_CASE("alpha table validation") {
  using Rows = std::vector<std::vector<double>>;
  CHECK_THROWS_AS(AlphaTable(Rows{{0.5, 0.5}}), std::invalid_argument);  // size
  CHECK_THROWS_AS(AlphaTable(Rows{{0.7}, {0.2, 0.2}}), std::invalid_argument);
  CHECK_THROWS_AS(AlphaTable(Rows{{-0.1}}), std::invalid_argument);
}

TEST_CASE("equilibrium delay closed form") {
  SUBCASE("theta 0 gives 1/lambda at every level") {
    for (int h = 1; h <= 30; ++h)
      CHECK(equilibrium_waiting_time(h, 0.0, 4.0) ==
            doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("pinned example") {
    CHECK(equilibrium_waiting_time(3, 0.25, 0.5) ==
          doctest::Approx(3.7777777777777777).epsilon(1e-12));
  }
  SUBCASE("closed form equals naive summation") {
    for (double theta : {0.1, 0.25, 0.3, 0.4})
      for (int h : {1, 2, 5, 17, 60})
        CHECK(equilibrium_waiting_time(h, theta, 0.7) ==
              doctest::Approx(naive_equilibrium(h, theta, 0.7))
                  .epsilon(1e-12));
  }
  SUBCASE("monotone increasing in h") {
    double prev = 0.0;
    for (int h = 1; h <= 40; ++h) {
      const double t = equilibrium_waiting_time(h, 0.3, 1.0);
      CHECK(t >= prev);
      prev = t;
    }
  }
  SUBCASE("theta at or above one half is rejected") {
    CHECK_THROWS_AS(equilibrium_waiting_time(3, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(equilibrium_waiting_time(3, 0.7, 1.0), std::domain_error);
    CHECK_THROWS_AS(equilibrium_waiting_time(3, -0.1, 1.0), std::domain_error);
  }
}

TEST_CASE("delay converges to the asymptotic rate") {
  for (double theta : {0.1, 0.25, 0.3, 0.4})
    for (double lambda : {0.25, 0.5, 1.0}) {
      const double t_inf = 1.0 / asymptotic_rate(theta, lambda);
      const double t_200 = equilibrium_waiting_time(200, theta, lambda);
      CHECK(std::abs(t_200 - t_inf) / t_inf <= 1e-8);
    }
  CHECK(asymptotic_rate(0.25, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("waiting payoff and reservation spread") {
  CHECK(waiting_payoff(3, 0.01, 2.0, 0.01) ==
        doctest::Approx(0.01).epsilon(1e-12));
  ModelParams mp;
  mp.lambda = 1.0;
  mp.theta_p = 0.25;
  auto schedule = [&](int j) {
    return equilibrium_waiting_time(j, mp.theta_p, mp.lambda);
  };
  SUBCASE("cheap waiting posts at the narrowest spread") {
    const auto j = reservation_spread(0.005, mp, schedule);
    REQUIRE(j.has_value());
    CHECK(*j == 1);
  }
  SUBCASE("costly waiting pushes the reservation spread out") {
    const auto j1 = reservation_spread(0.02, mp, schedule);
    REQUIRE(j1.has_value());
    CHECK(*j1 > 1);
    // payoff is negative just below, nonnegative at the reservation point
    CHECK(waiting_payoff(*j1, 0.02, schedule(*j1), mp.tick) >= 0.0);
    CHECK(waiting_payoff(*j1 - 1, 0.02, schedule(*j1 - 1), mp.tick) < 0.0);
  }
  SUBCASE("prohibitive waiting cost leaves no viable spread") {
    CHECK_FALSE(reservation_spread(1e6, mp, schedule).has_value());
  }
}

TEST_CASE("expected prices move both quotes inward") {
  ModelParams mp;
  mp.theta_p = 0.25;
  const QuotePair q = expected_prices(mp, 2, 0);
  const double adj = mp.tick * (0.25 * 2 + 0.75 * 0);
  CHECK(q.p_buy == doctest::Approx(mp.ask_a - adj).epsilon(1e-14));
  CHECK(q.p_sell == doctest::Approx(mp.bid_b + adj).epsilon(1e-14));
}

TEST_CASE("model params validation") {
  ModelParams mp;
  CHECK_NOTHROW(mp.validate());
  mp.theta_p = 0.5;
  CHECK_THROWS_AS(mp.validate(), std::domain_error);
  mp.theta_p = 0.1;
  mp.max_spread_k = 37;  // inconsistent with (a - b) / tick
  CHECK_THROWS_AS(mp.validate(), std::invalid_argument);
}
