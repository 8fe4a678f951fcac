#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "accessim/csfq.hpp"
#include "accessim/fair_rate.hpp"
#include "accessim/rng.hpp"

using namespace accessim;

namespace {

Packet nonconformant_packet(FlowId flow, std::int32_t length, SimTime at) {
  Packet p;
  p.flow_id = flow;
  p.length = length;
  p.kind = PacketKind::kUdpData;
  p.conformance = Conformance::kNonconformant;
  p.created_at = at;
  return p;
}

Packet conformant_packet(FlowId flow, std::int32_t length, SimTime at) {
  Packet p = nonconformant_packet(flow, length, at);
  p.conformance = Conformance::kConformant;
  return p;
}

struct CbrStream {
  FlowId flow;
  SimTime period;
  SimTime next{};
};

struct StreamResult {
  std::vector<std::uint64_t> accepted_bytes;
  std::vector<std::uint64_t> offered_bytes;
  std::vector<std::uint64_t> dropped_pkts;
  std::vector<std::uint64_t> offered_pkts;
};

// Drives non-conformant CBR streams through the controller, draining the FIFO
// continuously, and accumulates per-flow tallies from `measure_from` on.
StreamResult drive(CsfqController& ctl, std::vector<CbrStream> streams, SimTime until,
                   SimTime measure_from, Rng& rng) {
  const std::size_t n = ctl.subscriber_count();
  StreamResult result{std::vector<std::uint64_t>(n, 0), std::vector<std::uint64_t>(n, 0),
                      std::vector<std::uint64_t>(n, 0), std::vector<std::uint64_t>(n, 0)};
  FifoQueue fifo(1'000'000'000);
  for (;;) {
    std::size_t next_idx = 0;
    for (std::size_t i = 1; i < streams.size(); ++i)
      if (streams[i].next < streams[next_idx].next) next_idx = i;
    CbrStream& s = streams[next_idx];
    if (s.next >= until) break;
    const EnqueueOutcome outcome =
        ctl.on_packet(fifo, nonconformant_packet(s.flow, 1000, s.next), s.next, rng);
    fifo.pop();
    if (s.next >= measure_from) {
      result.offered_bytes[s.flow] += 1000;
      ++result.offered_pkts[s.flow];
      if (outcome == EnqueueOutcome::kEnqueued) {
        result.accepted_bytes[s.flow] += 1000;
      } else {
        ++result.dropped_pkts[s.flow];
      }
    }
    s.next += s.period;
  }
  return result;
}

}  // namespace

TEST_CASE("alpha_hat and C_ex start at the capacity") {
  CsfqController ctl(CsfqConfig{.capacity_bps = 100'000'000, .weights = {1.0, 1.0}});
  CHECK(ctl.excess_bw_bps() == doctest::Approx(100e6));
  CHECK(ctl.alpha_hat_bps() == doctest::Approx(100e6));
  CHECK(ctl.r_max_bps() == 0.0);
  CHECK_FALSE(ctl.congested());
  // Early drop probabilities are 0: the first nonconformant packet passes.
  FifoQueue fifo(1'000'000);
  Rng rng(1);
  CHECK(ctl.on_packet(fifo, nonconformant_packet(0, 1000, SimTime{}), SimTime{}, rng) ==
        EnqueueOutcome::kEnqueued);
}

TEST_CASE("excess bandwidth definition and clamp") {
  CsfqController ctl(CsfqConfig{.capacity_bps = 100'000'000, .weights = {1.0}});
  CHECK(ctl.refresh_excess_bw() == doctest::Approx(100e6));  // idle: r_c = 0

  FifoQueue fifo(1'000'000'000);
  Rng rng(1);
  // Converge r_c to 60 Mb/s: 1000 B every 2/15 ms for 3 s.
  SimTime t{};
  const SimTime period = SimTime::from_ns(133'333);
  while (t < SimTime::from_seconds(3)) {
    ctl.on_packet(fifo, conformant_packet(0, 1000, t), t, rng);
    fifo.pop();
    t += period;
  }
  CHECK(ctl.conformant_rate_bps() == doctest::Approx(60e6).epsilon(0.01));
  CHECK(ctl.excess_bw_bps() == doctest::Approx(40e6).epsilon(0.02));
}

TEST_CASE("transient conformant rate above C clamps C_ex to zero") {
  CsfqController ctl(CsfqConfig{.capacity_bps = 100'000'000, .weights = {1.0}});
  FifoQueue fifo(1'000'000'000);
  Rng rng(1);
  SimTime t{};
  while (t < SimTime::from_seconds(2)) {  // 110 Mb/s offered conformant
    ctl.on_packet(fifo, conformant_packet(0, 1000, t), t, rng);
    fifo.pop();
    t += SimTime::from_ns(72'727);
  }
  CHECK(ctl.conformant_rate_bps() > 100e6);
  CHECK(ctl.excess_bw_bps() == 0.0);
}

TEST_CASE("conformant packets update r_c and C_ex but never alpha_hat") {
  CsfqController ctl(CsfqConfig{.capacity_bps = 100'000'000, .weights = {1.0}});
  FifoQueue fifo(1'000'000);
  Rng rng(1);
  const double alpha_before = ctl.alpha_hat_bps();
  CHECK(ctl.on_packet(fifo, conformant_packet(0, 1000, SimTime::from_ms(1)), SimTime::from_ms(1),
                      rng) == EnqueueOutcome::kEnqueued);
  CHECK(ctl.conformant_rate_bps() > 0.0);
  CHECK(ctl.excess_bw_bps() < 100e6);
  CHECK(ctl.alpha_hat_bps() == alpha_before);
  CHECK(fifo.size() == 1);
}

TEST_CASE("prob floors at zero when alpha_hat * w covers the flow rate") {
  // Within the first window alpha_hat stays at C = 100 Mb/s, far above any
  // rate estimate, so max(0, 1 - alpha * w / r) pins the probability to zero
  // and nonconformant packets pass even when the random draw is small.
  CsfqController ctl(CsfqConfig{.capacity_bps = 100'000'000, .weights = {2.0, 1.0}});
  FifoQueue fifo(100'000'000);
  Rng rng(7);
  SimTime t{};
  for (int k = 0; k < 300; ++k) {
    CHECK(ctl.on_packet(fifo, nonconformant_packet(0, 1000, t), t, rng) ==
          EnqueueOutcome::kEnqueued);
    t += SimTime::from_us(500);
  }
}

TEST_CASE("a full FIFO tail-drops regardless of conformance") {
  CsfqController ctl(CsfqConfig{.capacity_bps = 100'000'000, .weights = {1.0}});
  FifoQueue fifo(2500);
  Rng rng(3);
  SimTime t{};
  CHECK(ctl.on_packet(fifo, conformant_packet(0, 1000, t), t, rng) == EnqueueOutcome::kEnqueued);
  t += SimTime::from_us(1);
  CHECK(ctl.on_packet(fifo, nonconformant_packet(0, 1000, t), t, rng) ==
        EnqueueOutcome::kEnqueued);
  t += SimTime::from_us(1);
  CHECK(ctl.on_packet(fifo, conformant_packet(0, 1000, t), t, rng) ==
        EnqueueOutcome::kDroppedOverflow);
  CHECK(fifo.size() == 2);
}

TEST_CASE("uncongested single flow: alpha_hat settles on its normalized rate") {
  CsfqController ctl(CsfqConfig{.capacity_bps = 100'000'000, .weights = {4.0}});
  Rng rng(17);
  // 5 Mb/s nonconformant, normalized by the canonical weight 1.
  drive(ctl, {{0, SimTime::from_us(1600)}}, SimTime::from_seconds(5), SimTime::from_seconds(5),
        rng);
  CHECK_FALSE(ctl.congested());
  CHECK(ctl.alpha_hat_bps() == doctest::Approx(5e6).epsilon(0.05));
}

TEST_CASE("stationary overload converges to the waterfilling fair rate") {
  // C_ex stays at C = 10 Mb/s (no conformant traffic). Flow 0 offers 4 Mb/s,
  // flow 1 offers 20 Mb/s; the oracle gives alpha = 6 Mb/s, so flow 1 is
  // dropped with probability 0.7 and accepted at about 6 Mb/s.
  CsfqController ctl(CsfqConfig{.capacity_bps = 10'000'000, .weights = {1.0, 1.0}});
  Rng rng(23);
  const auto result = drive(ctl, {{0, SimTime::from_ms(2)}, {1, SimTime::from_us(400)}},
                            SimTime::from_seconds(20), SimTime::from_seconds(10), rng);
  const std::vector<double> w{1.0, 1.0};
  const std::vector<double> rates{4e6, 20e6};
  const double alpha = solve_fair_rate(10e6, w, rates);
  CHECK(alpha == doctest::Approx(6e6));
  CHECK(ctl.congested());
  CHECK(ctl.alpha_hat_bps() == doctest::Approx(alpha).epsilon(0.10));

  const double measured_s = 10.0;
  const double accepted_1 = 8.0 * static_cast<double>(result.accepted_bytes[1]) / measured_s;
  CHECK(accepted_1 == doctest::Approx(6e6).epsilon(0.10));
  const double drop_fraction =
      static_cast<double>(result.dropped_pkts[1]) / static_cast<double>(result.offered_pkts[1]);
  CHECK(drop_fraction == doctest::Approx(0.7).epsilon(0.10));
  // Flow 0 sits below the fair rate and passes untouched.
  const double accepted_0 = 8.0 * static_cast<double>(result.accepted_bytes[0]) / measured_s;
  CHECK(accepted_0 == doctest::Approx(4e6).epsilon(0.02));
  // Aggregate acceptance tracks C_ex within 10%.
  const double total = accepted_0 + accepted_1;
  CHECK(total == doctest::Approx(10e6).epsilon(0.10));
}

TEST_CASE("weighted stationary overload splits acceptance per the oracle") {
  // C_ex stays at C = 30 Mb/s; three flows with weights 1:2:4 offer
  // 20/10/12 Mb/s of nonconformant traffic.
  CsfqController ctl(CsfqConfig{.capacity_bps = 30'000'000, .weights = {1.0, 2.0, 4.0}});
  Rng rng(77);
  const auto result = drive(ctl,
                            {{0, SimTime::from_us(400)},    // 20 Mb/s
                             {1, SimTime::from_us(800)},    // 10 Mb/s
                             {2, SimTime::from_us(666)}},   // ~12 Mb/s
                            SimTime::from_seconds(24), SimTime::from_seconds(12), rng);
  const std::vector<double> w{1.0, 2.0, 4.0};
  const std::vector<double> rates{20e6, 10e6, 8.0 * 1000.0 / 666e-6};
  const double alpha = solve_fair_rate(30e6, w, rates);
  for (FlowId f = 0; f < 3; ++f) {
    const double accepted = 8.0 * static_cast<double>(result.accepted_bytes[f]) / 12.0;
    const double fair = w[f] * std::min(alpha, rates[f] / w[f]);
    CHECK(accepted == doctest::Approx(fair).epsilon(0.10));
  }
}

TEST_CASE("buffer amendment cuts while the level sits past the threshold, once per K") {
  CsfqConfig cfg;
  cfg.capacity_bps = 100'000'000;
  cfg.weights = {1.0};
  cfg.amendment_enabled = true;
  cfg.amendment_threshold_bytes = 64'000;
  cfg.amendment_factor = 0.09;
  CsfqController ctl(cfg);
  const double alpha0 = ctl.alpha_hat_bps();
  FifoQueue fifo(1'000'000);
  Rng rng(4);
  // Advances the controller clock without touching alpha_hat (conformant
  // packets bypass the dropper and the near-empty FIFO stays below threshold).
  SimTime clock{};
  const auto advance = [&](SimTime dt) {
    clock += dt;
    ctl.on_packet(fifo, conformant_packet(0, 1000, clock), clock, rng);
    fifo.pop();
  };
  advance(SimTime::from_ms(1));

  ctl.buffer_amendment(63'000, 65'000);  // crossed the threshold
  CHECK(ctl.alpha_hat_bps() == doctest::Approx(alpha0 * 0.91));
  ctl.buffer_amendment(65'000, 66'000);  // within K of the last cut: no change
  CHECK(ctl.alpha_hat_bps() == doctest::Approx(alpha0 * 0.91));

  advance(SimTime::from_ms(150));        // past K = 100 ms
  ctl.buffer_amendment(65'000, 66'000);  // still past the threshold: cuts again
  CHECK(ctl.alpha_hat_bps() == doctest::Approx(alpha0 * 0.91 * 0.91));

  advance(SimTime::from_ms(150));
  ctl.buffer_amendment(70'000, 63'999);  // below the threshold: never cuts
  CHECK(ctl.alpha_hat_bps() == doctest::Approx(alpha0 * 0.91 * 0.91));
  CHECK(ctl.amendment_cuts() == 2);

  // n spaced crossings compose to 0.91^n.
  CsfqController repeat(cfg);
  SimTime t{};
  Rng rng2(5);
  for (int k = 0; k < 5; ++k) {
    t += SimTime::from_ms(150);
    repeat.on_packet(fifo, conformant_packet(0, 1000, t), t, rng2);
    fifo.pop();
    repeat.buffer_amendment(0, 64'000);
  }
  CHECK(repeat.alpha_hat_bps() == doctest::Approx(alpha0 * std::pow(0.91, 5)));
}

TEST_CASE("uniformly rescaling weights changes no decision") {
  const auto outcomes = [](std::vector<double> weights) {
    CsfqController ctl(CsfqConfig{.capacity_bps = 10'000'000, .weights = std::move(weights)});
    Rng rng(99);
    FifoQueue fifo(1'000'000'000);
    std::vector<EnqueueOutcome> seq;
    SimTime t0{};
    SimTime t1{};
    for (int k = 0; k < 40'000; ++k) {
      // Interleave: flow 0 at 8 Mb/s, flow 1 at 16 Mb/s.
      seq.push_back(ctl.on_packet(fifo, nonconformant_packet(0, 1000, t0), t0, rng));
      fifo.pop();
      t0 += SimTime::from_us(1000);
      for (int j = 0; j < 2; ++j) {
        seq.push_back(ctl.on_packet(fifo, nonconformant_packet(1, 1000, t1), t1, rng));
        fifo.pop();
        t1 += SimTime::from_us(500);
      }
    }
    return std::make_pair(seq, ctl.alpha_hat_bps());
  };
  const auto [seq_a, alpha_a] = outcomes({1.0, 2.0});
  const auto [seq_b, alpha_b] = outcomes({7.0, 14.0});
  CHECK(seq_a == seq_b);
  CHECK(alpha_a == alpha_b);  // canonical units: identical, user units scale by 1/c
}

TEST_CASE("weight scale and canonical weights") {
  CsfqController ctl(CsfqConfig{.capacity_bps = 100'000'000, .weights = {2.5, 5.0, 7.5, 10.0}});
  CHECK(ctl.weight_scale() == doctest::Approx(2.5));
  CHECK(ctl.canonical_weight(0) == doctest::Approx(1.0));
  CHECK(ctl.canonical_weight(3) == doctest::Approx(4.0));
}
