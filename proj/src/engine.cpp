#include "accessim/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "accessim/csfq.hpp"
#include "accessim/drr.hpp"
#include "accessim/event_queue.hpp"
#include "accessim/fifo_queue.hpp"
#include "accessim/link.hpp"
#include "accessim/rng.hpp"
#include "accessim/token_bucket.hpp"
#include "accessim/traffic.hpp"

namespace accessim {
namespace {

constexpr SimTime kAccessSideDelay = SimTime::from_us(100);  // feeder + UNI propagation

class Simulation {
 public:
  Simulation(const ScenarioSpec& spec, SchemeId scheme, std::uint64_t seed, SimTime bin_width)
      : spec_(spec), scheme_(scheme) {
    if (bin_width.ticks() <= 0) throw std::invalid_argument("bin width must be positive");
    if (auto errors = validate_scenario(spec); !errors.empty()) {
      std::string message = "invalid scenario";
      for (const auto& e : errors) message += "; " + e.message;
      throw std::invalid_argument(message);
    }

    n_ = spec.subscribers.size();
    for (std::size_t i = 0; i < n_; ++i) weights_.push_back(spec.weight(i));

    record_.scheme = scheme;
    record_.seed = seed;
    record_.scenario_digest = scenario_digest(spec);
    record_.bin_width = bin_width;
    record_.horizon = spec.horizon;
    record_.flows.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      record_.flows[i].group = spec.subscribers[i].group;
      record_.flows[i].token_rate_bps = spec.subscribers[i].token_rate_bps;
      record_.flows[i].weight = weights_[i];
    }
    const std::size_t bins = record_.bin_count();
    record_.delivered_bytes_bins.assign(n_, std::vector<std::uint64_t>(bins, 0));
    record_.inversion_bins.assign(n_, std::vector<std::uint32_t>(bins, 0));
    record_.feeder_bytes_bins.assign(bins, 0);

    Rng master(seed);
    drop_rng_ = std::make_unique<Rng>(master.fork(0));
    jitter_rng_ = std::make_unique<Rng>(master.fork(1));

    // Propagation budget: the backbone carries the RTT minus a fixed 0.1 ms
    // access side (split between feeder and UNI); the reverse path is a pure
    // half-RTT delay.
    const SimTime half_rtt = SimTime::from_ticks(spec.rtt.ticks() / 2);
    if (half_rtt <= kAccessSideDelay) throw std::invalid_argument("rtt too small");
    const SimTime backbone_prop = half_rtt - kAccessSideDelay;
    const SimTime feeder_prop = SimTime::from_ticks(kAccessSideDelay.ticks() / 2);
    const SimTime uni_prop = kAccessSideDelay - feeder_prop;
    reverse_delay_ = half_rtt;

    backbone_ = std::make_unique<Link>(ev_, spec.backbone_rate_bps, backbone_prop);
    backbone_->set_source([this]() -> std::optional<Packet> {
      if (server_q_.empty()) return std::nullopt;
      Packet p = std::move(server_q_.front());
      server_q_.pop_front();
      return p;
    });
    backbone_->set_sink([this](Packet&& p) { on_access_arrival(std::move(p)); });

    feeder_ = std::make_unique<Link>(ev_, spec.feeder_rate_bps, feeder_prop);
    if (scheme == SchemeId::kDrrTbm) {
      DrrConfig cfg;
      cfg.conformant_capacity_bytes = spec.drr_conformant_fifo_bytes;
      cfg.subscriber_capacity_bytes = spec.drr_subscriber_queue_bytes;
      cfg.weights = weights_;
      drr_ = std::make_unique<DrrScheduler>(cfg);
      feeder_->set_source([this] { return drr_->dequeue(); });
    } else {
      CsfqConfig cfg;
      cfg.capacity_bps = spec.feeder_rate_bps;
      cfg.k_rate_seconds = spec.k.seconds();
      cfg.k_alpha_seconds = spec.k_alpha.seconds();
      cfg.weights = weights_;
      cfg.amendment_enabled = scheme == SchemeId::kCsfq2Tbm;
      cfg.amendment_threshold_bytes = spec.amendment_threshold_bytes;
      cfg.amendment_factor = spec.amendment_factor;
      csfq_ = std::make_unique<CsfqController>(cfg);
      fifo_ = std::make_unique<FifoQueue>(spec.csfq_fifo_bytes);
      feeder_->set_source([this] { return fifo_->pop(); });
    }
    feeder_->set_tx_done([this](const Packet& p, SimTime t) {
      record_.feeder_bytes_bins[bin_of(t)] += static_cast<std::uint64_t>(p.length);
    });
    feeder_->set_sink([this](Packet&& p) {
      const FlowId i = p.flow_id;
      uni_q_[i].push_back(std::move(p));
      uni_[i]->kick();
    });

    uni_q_.resize(n_);
    max_delivered_seq_.assign(n_, std::array<std::int64_t, 2>{-1, -1});
    for (std::size_t i = 0; i < n_; ++i) {
      auto link = std::make_unique<Link>(ev_, spec.uni_rate_bps, uni_prop);
      link->set_source([this, i]() -> std::optional<Packet> {
        if (uni_q_[i].empty()) return std::nullopt;
        Packet p = std::move(uni_q_[i].front());
        uni_q_[i].pop_front();
        return p;
      });
      link->set_sink([this, i](Packet&& p) { deliver(static_cast<FlowId>(i), std::move(p)); });
      uni_.push_back(std::move(link));
    }

    for (std::size_t i = 0; i < n_; ++i) {
      meters_.emplace_back(spec.subscribers[i].token_rate_bps, spec.subscribers[i].bucket_bytes);
    }

    tcp_sources_.resize(n_);
    tcp_sinks_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const SubscriberSpec& sub = spec.subscribers[i];
      SimTime start = sub.start_time;
      if (spec.start_jitter.ticks() > 0) {
        const double u = jitter_rng_->uniform();
        start += SimTime::from_ticks(
            static_cast<std::int64_t>(u * static_cast<double>(spec.start_jitter.ticks())));
      }
      auto emit = [this](Packet&& p) {
        auto& fc = record_.flows[p.flow_id];
        ++fc.sent_pkts;
        fc.sent_bytes += static_cast<std::uint64_t>(p.length);
        server_q_.push_back(std::move(p));
        backbone_->kick();
      };
      if (const auto* udp = std::get_if<UdpTraffic>(&sub.source)) {
        udp_sources_.push_back(std::make_unique<UdpSource>(
            ev_, static_cast<FlowId>(i), udp->packet_bytes, udp->period, start, emit));
      } else {
        tcp_sources_[i] = std::make_unique<TcpSource>(ev_, static_cast<FlowId>(i), start, emit);
        tcp_sinks_[i] = std::make_unique<TcpSink>(static_cast<FlowId>(i));
      }
    }
  }

  RunRecord run() {
    if (csfq_) {
      const std::size_t bins = record_.bin_count();
      record_.alpha_hat_bins.assign(bins, 0.0);
      record_.excess_bw_bins.assign(bins, 0.0);
      record_.fifo_occupancy_bins.assign(bins, 0);
      for (std::size_t k = 0; k < bins; ++k) {
        ev_.schedule(record_.bin_width * static_cast<std::int64_t>(k), [this, k] {
          record_.alpha_hat_bins[k] = csfq_->alpha_hat_bps();
          record_.excess_bw_bins[k] = csfq_->excess_bw_bps();
          record_.fifo_occupancy_bins[k] = fifo_->occupancy_bytes();
        });
      }
    }
    for (auto& src : udp_sources_) src->start();
    for (auto& src : tcp_sources_)
      if (src) src->start();
    ev_.run_until(spec_.horizon);
    sweep_in_flight();
    if (csfq_) {
      record_.estimator_zero_dt_clamps = csfq_->estimator_zero_dt_clamps();
      record_.fhat_zero_skips = csfq_->debug().fhat_zero_skips;
    }
    return std::move(record_);
  }

 private:
  std::size_t bin_of(SimTime t) const {
    const std::size_t k =
        static_cast<std::size_t>(t.ticks() / record_.bin_width.ticks());
    return std::min(k, record_.bin_count() - 1);
  }

  void on_access_arrival(Packet&& p) {
    meters_[p.flow_id].meter(p, ev_.now());
    const FlowId flow = p.flow_id;
    const std::int32_t length = p.length;
    const Conformance conformance = p.conformance;

    EnqueueOutcome outcome;
    if (drr_) {
      outcome = drr_->enqueue(std::move(p));
    } else {
      outcome = csfq_->on_packet(*fifo_, std::move(p), ev_.now(), *drop_rng_);
      record_.max_fifo_occupancy_bytes =
          std::max(record_.max_fifo_occupancy_bytes, fifo_->occupancy_bytes());
    }

    auto& fc = record_.flows[flow];
    switch (outcome) {
      case EnqueueOutcome::kEnqueued:
        break;
      case EnqueueOutcome::kDroppedProb:
        ++fc.dropped_prob_pkts;
        fc.dropped_prob_bytes += static_cast<std::uint64_t>(length);
        if (conformance == Conformance::kConformant) ++fc.dropped_prob_conformant_pkts;
        break;
      case EnqueueOutcome::kDroppedOverflow:
        ++fc.dropped_overflow_pkts;
        fc.dropped_overflow_bytes += static_cast<std::uint64_t>(length);
        if (conformance == Conformance::kConformant) ++fc.dropped_overflow_conformant_pkts;
        break;
    }
    feeder_->kick();
  }

  void deliver(FlowId i, Packet&& p) {
    assert(is_data(p.kind));
    const SimTime now = ev_.now();
    auto& fc = record_.flows[i];
    ++fc.delivered_pkts;
    fc.delivered_bytes += static_cast<std::uint64_t>(p.length);
    if (p.conformance == Conformance::kConformant) {
      fc.delivered_conformant_bytes += static_cast<std::uint64_t>(p.length);
    } else {
      fc.delivered_nonconformant_bytes += static_cast<std::uint64_t>(p.length);
    }
    record_.delivered_bytes_bins[i][bin_of(now)] += static_cast<std::uint64_t>(p.length);

    auto& max_seq = max_delivered_seq_[i][p.kind == PacketKind::kTcpData ? 1 : 0];
    if (p.seq_no < max_seq) {
      ++record_.inversion_bins[i][bin_of(now)];
      ++fc.inversions;
    } else {
      max_seq = p.seq_no;
    }

    if (p.kind == PacketKind::kTcpData && tcp_sinks_[i]) {
      const Packet ack = tcp_sinks_[i]->on_data(p, now);
      ev_.schedule(now + reverse_delay_, [this, i, ack] { tcp_sources_[i]->on_ack(ack); });
    }
  }

  void sweep_in_flight() {
    const auto add = [this](const Packet& p) {
      if (!is_data(p.kind)) return;
      auto& fc = record_.flows[p.flow_id];
      ++fc.in_flight_end_pkts;
      fc.in_flight_end_bytes += static_cast<std::uint64_t>(p.length);
    };
    for (const Packet& p : server_q_) add(p);
    if (fifo_) {
      for (const Packet& p : fifo_->packets()) add(p);
    }
    if (drr_) {
      for (const Packet& p : drr_->conformant_fifo().packets()) add(p);
      for (std::size_t i = 0; i < n_; ++i)
        for (const Packet& p : drr_->subscriber_queue(static_cast<FlowId>(i)).packets()) add(p);
    }
    for (const auto& q : uni_q_)
      for (const Packet& p : q) add(p);
    const auto add_link = [this](const Link& link) {
      for (const auto& [flow, t] : link.in_transit()) {
        record_.flows[flow].in_flight_end_pkts += static_cast<std::uint64_t>(t.packets);
        record_.flows[flow].in_flight_end_bytes += static_cast<std::uint64_t>(t.bytes);
      }
    };
    add_link(*backbone_);
    add_link(*feeder_);
    for (const auto& link : uni_) add_link(*link);
  }

  ScenarioSpec spec_;
  SchemeId scheme_;
  std::size_t n_ = 0;
  std::vector<double> weights_;

  EventQueue ev_;
  RunRecord record_;
  std::unique_ptr<Rng> drop_rng_;
  std::unique_ptr<Rng> jitter_rng_;
  SimTime reverse_delay_{};

  std::deque<Packet> server_q_;
  std::unique_ptr<Link> backbone_;
  std::vector<TokenBucketMeter> meters_;
  std::unique_ptr<CsfqController> csfq_;
  std::unique_ptr<FifoQueue> fifo_;
  std::unique_ptr<DrrScheduler> drr_;
  std::unique_ptr<Link> feeder_;
  std::vector<std::deque<Packet>> uni_q_;
  std::vector<std::unique_ptr<Link>> uni_;
  std::vector<std::unique_ptr<UdpSource>> udp_sources_;
  std::vector<std::unique_ptr<TcpSource>> tcp_sources_;
  std::vector<std::unique_ptr<TcpSink>> tcp_sinks_;
  std::vector<std::array<std::int64_t, 2>> max_delivered_seq_;  // [flow][udp|tcp]
};

}  // namespace

RunRecord run_simulation(const ScenarioSpec& spec, SchemeId scheme, std::uint64_t seed,
                         SimTime bin_width) {
  Simulation sim(spec, scheme, seed, bin_width);
  return sim.run();
}

std::vector<RunRecord> run_repetitions(const ScenarioSpec& spec, SchemeId scheme, int repetitions,
                                       std::uint64_t base_seed, SimTime bin_width, int jobs) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, repetitions));

  std::vector<RunRecord> records(static_cast<std::size_t>(repetitions));
  if (jobs == 1) {
    for (int r = 0; r < repetitions; ++r) {
      records[static_cast<std::size_t>(r)] =
          run_simulation(spec, scheme, base_seed + static_cast<std::uint64_t>(r), bin_width);
    }
    return records;
  }

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= repetitions) return;
        try {
          records[static_cast<std::size_t>(r)] =
              run_simulation(spec, scheme, base_seed + static_cast<std::uint64_t>(r), bin_width);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
  return records;
}

}  // namespace accessim
