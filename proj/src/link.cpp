#include "accessim/link.hpp"

#include <cassert>
#include <stdexcept>
#include <utility>

namespace accessim {

Link::Link(EventQueue& ev, std::int64_t rate_bps, SimTime propagation_delay)
    : ev_(ev), rate_(rate_bps), propagation_(propagation_delay) {
  if (rate_bps <= 0) throw std::invalid_argument("link rate must be positive");
  if (propagation_delay.ticks() < 0) throw std::invalid_argument("negative propagation delay");
}

void Link::kick() {
  if (busy_) return;
  assert(source_ && sink_);
  std::optional<Packet> next = source_();
  if (!next) return;
  busy_ = true;
  auto& t = in_transit_[next->flow_id];
  ++t.packets;
  t.bytes += next->length;
  const SimTime done_at = ev_.now() + transmission_time(next->length, rate_);
  ev_.schedule(done_at, [this, p = std::move(*next)]() mutable {
    busy_ = false;
    if (tx_done_) tx_done_(p, ev_.now());
    if (propagation_.ticks() == 0) {
      auto& u = in_transit_[p.flow_id];
      --u.packets;
      u.bytes -= p.length;
      sink_(std::move(p));
    } else {
      ev_.schedule_in(propagation_, [this, p = std::move(p)]() mutable {
        auto& u = in_transit_[p.flow_id];
        --u.packets;
        u.bytes -= p.length;
        sink_(std::move(p));
      });
    }
    kick();
  });
}

}  // namespace accessim
