#pragma once

#include <cstdint>

#include "accessim/sim_time.hpp"

namespace accessim {

using FlowId = std::uint32_t;

enum class PacketKind : std::uint8_t { kUdpData, kTcpData, kTcpAck };

// kUnmetered until the token-bucket meter has issued a verdict; never
// kUnmetered downstream of the meter.
enum class Conformance : std::uint8_t { kUnmetered, kConformant, kNonconformant };

struct Packet {
  FlowId flow_id = 0;
  std::int32_t length = 0;   // bytes, > 0
  std::int64_t seq_no = 0;   // per-(flow, kind) emission counter, dense
  PacketKind kind = PacketKind::kUdpData;
  Conformance conformance = Conformance::kUnmetered;
  SimTime created_at{};
  std::int64_t tcp_seq = 0;  // segment index for TCP_DATA, next expected segment for TCP_ACK
};

constexpr bool is_data(PacketKind k) { return k != PacketKind::kTcpAck; }

}  // namespace accessim
