#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "accessim/fifo_queue.hpp"
#include "accessim/packet.hpp"

namespace accessim {

struct DrrConfig {
  std::int64_t conformant_capacity_bytes = 1'000'000;
  std::int64_t subscriber_capacity_bytes = 1'000'000;
  std::vector<double> weights;
  std::int64_t quantum_base_bytes = 1'500;  // quantum of the lowest-weight subscriber
};

// Reference scheme: conformant packets share one strict-priority FIFO;
// non-conformant packets go to per-subscriber queues served by deficit
// round-robin with quanta proportional to the weights. The priority FIFO is
// re-checked before every dequeue, so preemption granularity is one packet.
class DrrScheduler {
 public:
  explicit DrrScheduler(DrrConfig cfg);

  EnqueueOutcome enqueue(Packet&& p);
  std::optional<Packet> dequeue();

  double quantum_bytes(FlowId i) const { return quantum_[i]; }
  double deficit_bytes(FlowId i) const { return deficit_[i]; }
  const FifoQueue& conformant_fifo() const { return conformant_; }
  const FifoQueue& subscriber_queue(FlowId i) const { return queues_[i]; }
  std::size_t subscriber_count() const { return queues_.size(); }
  bool empty() const;
  std::int64_t total_occupancy_bytes() const;

 private:
  FifoQueue conformant_;
  std::vector<FifoQueue> queues_;
  std::vector<double> quantum_;
  std::vector<double> deficit_;
  std::deque<FlowId> ring_;  // backlogged subscribers, round-robin order
  std::vector<bool> in_ring_;
  bool head_granted_ = false;
};

}  // namespace accessim
