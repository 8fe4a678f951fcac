#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "accessim/event_queue.hpp"
#include "accessim/packet.hpp"

namespace accessim {

inline constexpr std::int32_t kTcpSegmentBytes = 1000;
inline constexpr std::int32_t kTcpAckBytes = 64;

using EmitFn = std::function<void(Packet&&)>;

// Constant-bit-rate source: one fixed-size packet every period, starting at
// start_time.
class UdpSource {
 public:
  UdpSource(EventQueue& ev, FlowId flow, std::int32_t packet_bytes, SimTime period, SimTime start,
            EmitFn emit);

  void start();

  std::int64_t emitted() const { return next_seq_; }

 private:
  void emit_one();

  EventQueue& ev_;
  FlowId flow_;
  std::int32_t packet_bytes_;
  SimTime period_;
  SimTime start_;
  EmitFn emit_;
  std::int64_t next_seq_ = 0;
};

enum class TcpState : std::uint8_t { kSlowStart, kCongAvoid, kFastRecovery };

struct TcpSourceStats {
  std::uint64_t segments_sent = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t fast_retransmits = 0;
  std::uint64_t timeouts = 0;
};

// Greedy Reno-style AIMD sender: slow start, congestion avoidance, fast
// retransmit/recovery on three duplicate ACKs, and a coarse retransmission
// timeout of max(rto_floor, 2 * srtt) that restarts from snd_una with cwnd 1.
// Recovery runs to the highest segment outstanding when the loss was
// detected: partial ACKs retransmit the next hole without another halving,
// so one loss event costs one multiplicative decrease. Segment numbers are
// in segments, not bytes; the flow always has data.
class TcpSource {
 public:
  TcpSource(EventQueue& ev, FlowId flow, SimTime start, EmitFn emit);

  void start();
  void on_ack(const Packet& ack);

  double cwnd_segments() const { return cwnd_; }
  double ssthresh_segments() const { return ssthresh_; }
  TcpState state() const { return state_; }
  std::int64_t in_flight_segments() const { return next_seq_ - snd_una_; }
  std::int64_t snd_una() const { return snd_una_; }
  const TcpSourceStats& stats() const { return stats_; }

 private:
  void send_eligible(SimTime now);
  void send_segment(std::int64_t segment, SimTime now);
  void arm_rto(SimTime now);
  void disarm_rto() { ++rto_generation_; }
  void on_rto();

  EventQueue& ev_;
  FlowId flow_;
  SimTime start_;
  EmitFn emit_;

  double cwnd_ = 1.0;
  double ssthresh_ = 1e18;
  double max_window_ = 192.0;  // receiver advertised window, segments
  TcpState state_ = TcpState::kSlowStart;
  std::int64_t snd_una_ = 0;
  std::int64_t next_seq_ = 0;
  std::int64_t high_water_ = 0;  // highest segment ever sent + 1
  std::int64_t recover_ = 0;     // fast recovery runs until snd_una reaches this
  int dup_acks_ = 0;

  std::unordered_map<std::int64_t, SimTime> send_time_;
  std::unordered_set<std::int64_t> retransmitted_;
  std::optional<double> srtt_s_;
  double rto_floor_s_ = 0.2;
  std::uint64_t rto_generation_ = 0;
  bool rto_armed_ = false;

  std::int64_t next_packet_seq_ = 0;
  TcpSourceStats stats_;
};

// Receives data segments, delivers them in order, and answers every segment
// with a cumulative ACK carrying the next expected segment number.
class TcpSink {
 public:
  explicit TcpSink(FlowId flow) : flow_(flow) {}

  Packet on_data(const Packet& data, SimTime now);

  std::int64_t expected() const { return expected_; }
  std::uint64_t duplicates() const { return duplicates_; }

 private:
  FlowId flow_;
  std::int64_t expected_ = 0;
  std::set<std::int64_t> out_of_order_;
  std::int64_t next_ack_seq_ = 0;
  std::uint64_t duplicates_ = 0;
};

}  // namespace accessim
