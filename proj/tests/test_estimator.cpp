#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "accessim/rate_estimator.hpp"
#include "accessim/rng.hpp"

using namespace accessim;

TEST_CASE("steady state is a fixed point") {
  ExpAvgEstimator est(0.1);
  // rate already equals l/T: the convex combination leaves it unchanged.
  est.reset(16e6, SimTime{});
  const double updated = est.update(SimTime::from_us(500), 1000);  // 8000 bits / 0.5 ms = 16 Mb/s
  CHECK(updated == doctest::Approx(16e6).epsilon(1e-12));
}

TEST_CASE("single update from zero matches the closed form") {
  ExpAvgEstimator est(0.1);
  est.reset(0.0, SimTime{});
  const double rate = est.update(SimTime::from_us(500), 1000);
  const double expected = (1.0 - std::exp(-0.0005 / 0.1)) * 16e6;
  CHECK(rate == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(7.98e4).epsilon(1e-2));
}

TEST_CASE("first update bootstraps with T = K") {
  ExpAvgEstimator est(0.1);
  const double rate = est.update(SimTime::from_seconds(3), 1000);
  const double expected = (1.0 - std::exp(-1.0)) * 8000.0 / 0.1;
  CHECK(rate == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("CBR input converges within 1% after 10K") {
  ExpAvgEstimator est(0.1);
  SimTime t{};
  // 1000-byte packet every 0.5 ms = 16 Mb/s; run for 10K = 1 s.
  for (int k = 0; k <= 2000; ++k) {
    est.update(t, 1000);
    t += SimTime::from_us(500);
  }
  CHECK(std::abs(est.rate_bps() - 16e6) / 16e6 < 0.01);
}

TEST_CASE("estimate never goes negative on arbitrary traces") {
  Rng rng(11);
  ExpAvgEstimator est(0.05);
  SimTime t{};
  for (int k = 0; k < 5000; ++k) {
    t += SimTime::from_us(static_cast<std::int64_t>(rng.uniform() * 10'000.0));
    est.update(t, 1 + static_cast<std::int64_t>(rng.uniform() * 1500.0));
    REQUIRE(est.rate_bps() >= 0.0);
  }
}

TEST_CASE("scaling packet lengths scales the converged estimate") {
  const auto converged = [](std::int64_t length) {
    ExpAvgEstimator est(0.1);
    SimTime t{};
    for (int k = 0; k <= 4000; ++k) {
      est.update(t, length);
      t += SimTime::from_us(500);
    }
    return est.rate_bps();
  };
  const double base = converged(500);
  const double tripled = converged(1500);
  CHECK(tripled / base == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("same-tick updates clamp T to one tick and are counted") {
  ExpAvgEstimator est(0.1);
  est.update(SimTime::from_ms(1), 1000);
  CHECK(est.zero_dt_clamps() == 0);
  est.update(SimTime::from_ms(1), 1000);
  CHECK(est.zero_dt_clamps() == 1);
  CHECK(est.rate_bps() >= 0.0);
  // For T -> 0 the update tends to rate + l/K; it must stay finite.
  CHECK(std::isfinite(est.rate_bps()));
}
