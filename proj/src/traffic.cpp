#include "accessim/traffic.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <utility>

namespace accessim {

UdpSource::UdpSource(EventQueue& ev, FlowId flow, std::int32_t packet_bytes, SimTime period,
                     SimTime start, EmitFn emit)
    : ev_(ev),
      flow_(flow),
      packet_bytes_(packet_bytes),
      period_(period),
      start_(start),
      emit_(std::move(emit)) {
  if (packet_bytes <= 0) throw std::invalid_argument("packet size must be positive");
  if (period.ticks() <= 0) throw std::invalid_argument("period must be positive");
}

void UdpSource::start() {
  ev_.schedule(start_, [this] { emit_one(); });
}

void UdpSource::emit_one() {
  Packet p;
  p.flow_id = flow_;
  p.length = packet_bytes_;
  p.seq_no = next_seq_++;
  p.kind = PacketKind::kUdpData;
  p.created_at = ev_.now();
  emit_(std::move(p));
  ev_.schedule_in(period_, [this] { emit_one(); });
}

TcpSource::TcpSource(EventQueue& ev, FlowId flow, SimTime start, EmitFn emit)
    : ev_(ev), flow_(flow), start_(start), emit_(std::move(emit)) {}

void TcpSource::start() {
  ev_.schedule(start_, [this] { send_eligible(ev_.now()); });
}

void TcpSource::send_eligible(SimTime now) {
  while (next_seq_ - snd_una_ < static_cast<std::int64_t>(std::min(cwnd_, max_window_))) {
    send_segment(next_seq_, now);
    ++next_seq_;
  }
  if (snd_una_ < next_seq_ && !rto_armed_) arm_rto(now);
}

void TcpSource::send_segment(std::int64_t segment, SimTime now) {
  Packet p;
  p.flow_id = flow_;
  p.length = kTcpSegmentBytes;
  p.seq_no = next_packet_seq_++;
  p.kind = PacketKind::kTcpData;
  p.created_at = now;
  p.tcp_seq = segment;
  send_time_[segment] = now;
  if (segment < high_water_) {
    retransmitted_.insert(segment);
    ++stats_.retransmissions;
  } else {
    high_water_ = segment + 1;
  }
  ++stats_.segments_sent;
  emit_(std::move(p));
}

void TcpSource::on_ack(const Packet& ack) {
  assert(ack.kind == PacketKind::kTcpAck);
  const SimTime now = ev_.now();
  const std::int64_t acked = ack.tcp_seq;

  if (acked > snd_una_) {
    // Karn: sample RTT only from segments sent exactly once.
    const std::int64_t newest = acked - 1;
    if (!retransmitted_.contains(newest)) {
      if (auto it = send_time_.find(newest); it != send_time_.end()) {
        const double sample = (now - it->second).seconds();
        srtt_s_ = srtt_s_ ? 0.875 * *srtt_s_ + 0.125 * sample : sample;
      }
    }
    for (std::int64_t s = snd_una_; s < acked; ++s) {
      send_time_.erase(s);
      retransmitted_.erase(s);
    }
    snd_una_ = acked;
    dup_acks_ = 0;
    if (state_ == TcpState::kFastRecovery) {
      if (snd_una_ >= recover_) {
        cwnd_ = ssthresh_;
        state_ = TcpState::kCongAvoid;
      } else {
        // Partial ACK: the next hole is lost too; retransmit it without a
        // further decrease.
        send_segment(snd_una_, now);
      }
    } else if (state_ == TcpState::kSlowStart) {
      cwnd_ = std::min(cwnd_ + 1.0, max_window_);
      if (cwnd_ >= ssthresh_) state_ = TcpState::kCongAvoid;
    } else {
      cwnd_ = std::min(cwnd_ + 1.0 / cwnd_, max_window_);
    }
    if (snd_una_ == next_seq_) {
      rto_armed_ = false;
      disarm_rto();
    } else if (state_ != TcpState::kFastRecovery) {
      // Partial ACKs do not restart the timer: a recovery that drags on
      // (many holes, one retransmission per round trip) times out instead.
      arm_rto(now);
    }
  } else if (snd_una_ < next_seq_) {
    ++dup_acks_;
    // Duplicates caused by retransmissions of data the receiver already has
    // (go-back-N after a timeout) must not trigger another fast retransmit;
    // only losses beyond the last recovery point count.
    if (dup_acks_ == 3 && state_ != TcpState::kFastRecovery && snd_una_ >= recover_) {
      ssthresh_ = std::max(static_cast<double>(next_seq_ - snd_una_) / 2.0, 2.0);
      cwnd_ = ssthresh_;
      state_ = TcpState::kFastRecovery;
      recover_ = next_seq_;
      ++stats_.fast_retransmits;
      send_segment(snd_una_, now);
      arm_rto(now);
    }
  }
  send_eligible(now);
}

void TcpSource::arm_rto(SimTime now) {
  const double rto_s = std::max(rto_floor_s_, srtt_s_ ? 2.0 * *srtt_s_ : rto_floor_s_);
  rto_armed_ = true;
  const std::uint64_t generation = ++rto_generation_;
  ev_.schedule(now + SimTime::from_seconds(rto_s), [this, generation] {
    if (generation == rto_generation_ && snd_una_ < next_seq_) on_rto();
  });
}

void TcpSource::on_rto() {
  const SimTime now = ev_.now();
  // Half the flight size, not the possibly deflated cwnd.
  ssthresh_ = std::max(static_cast<double>(next_seq_ - snd_una_) / 2.0, 2.0);
  cwnd_ = 1.0;
  state_ = TcpState::kSlowStart;
  dup_acks_ = 0;
  recover_ = next_seq_;
  ++stats_.timeouts;
  next_seq_ = snd_una_;  // go-back-N restart, refilled by ACK clocking
  rto_armed_ = false;
  send_eligible(now);
}

Packet TcpSink::on_data(const Packet& data, SimTime now) {
  assert(data.kind == PacketKind::kTcpData);
  const std::int64_t segment = data.tcp_seq;
  if (segment == expected_) {
    ++expected_;
    while (!out_of_order_.empty() && *out_of_order_.begin() == expected_) {
      out_of_order_.erase(out_of_order_.begin());
      ++expected_;
    }
  } else if (segment > expected_) {
    out_of_order_.insert(segment);
  } else {
    ++duplicates_;
  }

  Packet ack;
  ack.flow_id = flow_;
  ack.length = kTcpAckBytes;
  ack.seq_no = next_ack_seq_++;
  ack.kind = PacketKind::kTcpAck;
  ack.created_at = now;
  ack.tcp_seq = expected_;
  return ack;
}

}  // namespace accessim
