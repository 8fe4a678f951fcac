#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "accessim/fair_rate.hpp"
#include "accessim/rng.hpp"
#include "oracles.hpp"

using namespace accessim;

TEST_CASE("two flows, one saturated: alpha = 6") {
  const std::vector<double> w{1.0, 1.0};
  const std::vector<double> r{4e6, 20e6};
  CHECK(solve_fair_rate(10e6, w, r) == doctest::Approx(6e6).epsilon(1e-12));
}

TEST_CASE("uncongested fallback returns the maximum normalized rate") {
  const std::vector<double> w{1.0, 2.0};
  const std::vector<double> r{3.0, 2.0};
  CHECK(solve_fair_rate(100.0, w, r) == doctest::Approx(3.0));
  const std::vector<double> zero{0.0, 0.0};
  CHECK(solve_fair_rate(100.0, w, zero) == 0.0);
}

TEST_CASE("the 12-flow UDP overload splits 40 Mb/s as 1:2:3") {
  std::vector<double> w;
  std::vector<double> r;
  const double weights[] = {2.5, 5.0, 7.5};
  const double rates[] = {13.5e6, 11e6, 8.5e6};
  for (int g = 0; g < 3; ++g) {
    for (int m = 0; m < 4; ++m) {
      w.push_back(weights[g]);
      r.push_back(rates[g]);
    }
  }
  const double alpha = solve_fair_rate(40e6, w, r);
  CHECK(alpha == doctest::Approx(40e6 / 60.0).epsilon(1e-12));
  CHECK(2.5 * alpha == doctest::Approx(1.6667e6).epsilon(1e-3));
  CHECK(5.0 * alpha == doctest::Approx(3.3333e6).epsilon(1e-3));
  CHECK(7.5 * alpha == doctest::Approx(5.0e6).epsilon(1e-3));
}

TEST_CASE("infinite rates take the whole remainder by weight") {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> w{1.0, 3.0};
  const std::vector<double> r{2e6, inf};
  // Flow 0 saturates at 2 Mb/s; flow 1 takes the remaining 8 Mb/s over weight 3.
  CHECK(solve_fair_rate(10e6, w, r) == doctest::Approx(8e6 / 3.0).epsilon(1e-12));
  // Zero excess: alpha = 0.
  CHECK(solve_fair_rate(0.0, w, r) == 0.0);
}

TEST_CASE("negative excess bandwidth is rejected") {
  const std::vector<double> w{1.0};
  const std::vector<double> r{1.0};
  CHECK_THROWS_AS(solve_fair_rate(-1.0, w, r), std::invalid_argument);
  const std::vector<double> bad_w{0.0};
  CHECK_THROWS_AS(solve_fair_rate(1.0, bad_w, r), std::invalid_argument);
}

TEST_CASE("waterfilling agrees with the bisection oracle on 1000 random instances") {
  Rng rng(314159);
  for (int round = 0; round < 1000; ++round) {
    const int n = 1 + static_cast<int>(rng.uniform() * 8.0);
    std::vector<double> w(n);
    std::vector<double> r(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] = 0.1 + rng.uniform() * 9.9;
      r[i] = rng.uniform() * 20e6;
      total += r[i];
    }
    const double c_ex = rng.uniform() * 1.2 * total;
    const double closed = solve_fair_rate(c_ex, w, r);
    const double bisected = oracle::bisect_fair_rate(c_ex, w, r);
    const double scale = std::max({closed, bisected, 1.0});
    REQUIRE(std::abs(closed - bisected) / scale < 1e-9);
  }
}
