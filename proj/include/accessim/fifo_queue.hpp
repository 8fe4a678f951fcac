#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>

#include "accessim/packet.hpp"

namespace accessim {

enum class EnqueueOutcome : std::uint8_t { kEnqueued, kDroppedProb, kDroppedOverflow };

// Byte-bounded FIFO. Tail-drops when the arriving packet would exceed capacity.
class FifoQueue {
 public:
  explicit FifoQueue(std::int64_t capacity_bytes) : capacity_(capacity_bytes) {
    if (capacity_bytes <= 0) throw std::invalid_argument("queue capacity must be positive");
  }

  bool try_push(Packet&& p) {
    if (occupancy_ + p.length > capacity_) return false;
    occupancy_ += p.length;
    q_.push_back(std::move(p));
    return true;
  }

  std::optional<Packet> pop() {
    if (q_.empty()) return std::nullopt;
    Packet p = std::move(q_.front());
    q_.pop_front();
    occupancy_ -= p.length;
    return p;
  }

  std::int64_t occupancy_bytes() const { return occupancy_; }
  std::int64_t capacity_bytes() const { return capacity_; }
  std::size_t size() const { return q_.size(); }
  bool empty() const { return q_.empty(); }
  const std::deque<Packet>& packets() const { return q_; }

 private:
  std::int64_t capacity_;
  std::int64_t occupancy_ = 0;
  std::deque<Packet> q_;
};

}  // namespace accessim
