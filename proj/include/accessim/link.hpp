#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>

#include "accessim/event_queue.hpp"
#include "accessim/packet.hpp"

namespace accessim {

// Point-to-point serializing link: at most one packet in transmission at a
// time, occupying the wire for 8L/rate, then a propagation delay before
// handoff to the sink. The link pulls from `source` whenever it goes idle;
// call kick() after making new work available.
class Link {
 public:
  using PullFn = std::function<std::optional<Packet>()>;
  using DeliverFn = std::function<void(Packet&&)>;
  using TxDoneFn = std::function<void(const Packet&, SimTime)>;

  Link(EventQueue& ev, std::int64_t rate_bps, SimTime propagation_delay);

  void set_source(PullFn f) { source_ = std::move(f); }
  void set_sink(DeliverFn f) { sink_ = std::move(f); }
  void set_tx_done(TxDoneFn f) { tx_done_ = std::move(f); }

  void kick();

  bool busy() const { return busy_; }
  std::int64_t rate_bps() const { return rate_; }

  struct InTransit {
    std::int64_t packets = 0;
    std::int64_t bytes = 0;
  };
  const std::unordered_map<FlowId, InTransit>& in_transit() const { return in_transit_; }

 private:
  EventQueue& ev_;
  std::int64_t rate_;
  SimTime propagation_;
  bool busy_ = false;
  PullFn source_;
  DeliverFn sink_;
  TxDoneFn tx_done_;
  std::unordered_map<FlowId, InTransit> in_transit_;
};

}  // namespace accessim
