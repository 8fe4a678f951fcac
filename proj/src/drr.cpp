#include "accessim/drr.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace accessim {

DrrScheduler::DrrScheduler(DrrConfig cfg) : conformant_(cfg.conformant_capacity_bytes) {
  if (cfg.weights.empty()) throw std::invalid_argument("at least one subscriber weight required");
  if (cfg.quantum_base_bytes <= 0) throw std::invalid_argument("quantum base must be positive");
  double min_w = cfg.weights.front();
  for (double w : cfg.weights) {
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
    min_w = std::min(min_w, w);
  }
  const std::size_t n = cfg.weights.size();
  queues_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) queues_.emplace_back(cfg.subscriber_capacity_bytes);
  quantum_.reserve(n);
  for (double w : cfg.weights)
    quantum_.push_back(static_cast<double>(cfg.quantum_base_bytes) * w / min_w);
  deficit_.assign(n, 0.0);
  in_ring_.assign(n, false);
}

EnqueueOutcome DrrScheduler::enqueue(Packet&& p) {
  assert(p.conformance != Conformance::kUnmetered);
  const FlowId i = p.flow_id;
  if (i >= queues_.size()) throw std::out_of_range("unknown subscriber");

  if (p.conformance == Conformance::kConformant) {
    return conformant_.try_push(std::move(p)) ? EnqueueOutcome::kEnqueued
                                              : EnqueueOutcome::kDroppedOverflow;
  }
  if (!queues_[i].try_push(std::move(p))) return EnqueueOutcome::kDroppedOverflow;
  if (!in_ring_[i]) {
    if (ring_.empty()) head_granted_ = false;
    ring_.push_back(i);
    in_ring_[i] = true;
  }
  return EnqueueOutcome::kEnqueued;
}

std::optional<Packet> DrrScheduler::dequeue() {
  if (auto p = conformant_.pop()) return p;

  while (!ring_.empty()) {
    const FlowId i = ring_.front();
    FifoQueue& q = queues_[i];
    assert(!q.empty());
    if (!head_granted_) {
      deficit_[i] += quantum_[i];
      head_granted_ = true;
    }
    if (static_cast<double>(q.packets().front().length) <= deficit_[i]) {
      auto p = q.pop();
      deficit_[i] -= static_cast<double>(p->length);
      if (q.empty()) {
        deficit_[i] = 0.0;
        ring_.pop_front();
        in_ring_[i] = false;
        head_granted_ = false;
      }
      return p;
    }
    ring_.pop_front();
    ring_.push_back(i);
    head_granted_ = false;
  }
  return std::nullopt;
}

bool DrrScheduler::empty() const {
  if (!conformant_.empty()) return false;
  for (const auto& q : queues_)
    if (!q.empty()) return false;
  return true;
}

std::int64_t DrrScheduler::total_occupancy_bytes() const {
  std::int64_t total = conformant_.occupancy_bytes();
  for (const auto& q : queues_) total += q.occupancy_bytes();
  return total;
}

}  // namespace accessim
