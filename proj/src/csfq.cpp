#include "accessim/csfq.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace accessim {

CsfqController::CsfqController(CsfqConfig cfg)
    : capacity_(static_cast<double>(cfg.capacity_bps)),
      window_(SimTime::from_seconds(cfg.k_alpha_seconds)),
      r_c_(cfg.k_rate_seconds),
      a_hat_(cfg.k_alpha_seconds),
      f_hat_(cfg.k_alpha_seconds),
      amendment_enabled_(cfg.amendment_enabled),
      amendment_threshold_(cfg.amendment_threshold_bytes),
      amendment_factor_(cfg.amendment_factor),
      cut_spacing_(SimTime::from_seconds(cfg.k_rate_seconds)) {
  if (cfg.capacity_bps <= 0) throw std::invalid_argument("capacity must be positive");
  if (cfg.weights.empty()) throw std::invalid_argument("at least one subscriber weight required");
  if (cfg.amendment_factor < 0.0 || cfg.amendment_factor >= 1.0)
    throw std::invalid_argument("amendment factor must be in [0, 1)");
  double min_w = cfg.weights.front();
  for (double w : cfg.weights) {
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
    min_w = std::min(min_w, w);
  }
  weight_scale_ = min_w;
  canonical_weights_.reserve(cfg.weights.size());
  for (double w : cfg.weights) canonical_weights_.push_back(w / min_w);
  r_nc_.assign(cfg.weights.size(), ExpAvgEstimator(cfg.k_rate_seconds));

  c_ex_ = capacity_;
  alpha_hat_ = c_ex_;  // alpha_hat and r_max start at C_ex and 0
}

EnqueueOutcome CsfqController::on_packet(FifoQueue& fifo, Packet&& p, SimTime now, Rng& rng) {
  assert(p.conformance != Conformance::kUnmetered);
  const FlowId i = p.flow_id;
  if (i >= canonical_weights_.size()) throw std::out_of_range("unknown subscriber");
  last_packet_time_ = now;

  if (p.conformance == Conformance::kConformant) {
    r_c_.update(now, p.length);
    const std::int64_t before = fifo.occupancy_bytes();
    const bool enqueued = fifo.try_push(std::move(p));
    refresh_excess_bw();
    if (!enqueued) return EnqueueOutcome::kDroppedOverflow;
    if (amendment_enabled_) buffer_amendment(before, fifo.occupancy_bytes());
    return EnqueueOutcome::kEnqueued;
  }

  const double r_nc = r_nc_[i].update(now, p.length);
  const double prob = std::max(0.0, 1.0 - alpha_hat_ * canonical_weights_[i] / r_nc);
  const double r_norm = r_nc / canonical_weights_[i];
  const std::int32_t length = p.length;
  if (prob > rng.uniform()) {
    estimate_alpha(r_norm, length, true, now);
    return EnqueueOutcome::kDroppedProb;
  }
  estimate_alpha(r_norm, length, false, now);
  const std::int64_t before = fifo.occupancy_bytes();
  if (!fifo.try_push(std::move(p))) return EnqueueOutcome::kDroppedOverflow;
  if (amendment_enabled_) buffer_amendment(before, fifo.occupancy_bytes());
  return EnqueueOutcome::kEnqueued;
}

double CsfqController::estimate_alpha(double r_norm_bps, std::int64_t length_bytes, bool dropped,
                                      SimTime now) {
  // The observation window opens at the first update; a construction-time
  // start would make the first call read an empty window and zero alpha_hat.
  if (!alpha_started_) {
    alpha_started_ = true;
    window_start_ = now;
  }
  const double a = a_hat_.update(now, length_bytes);
  if (!dropped) f_hat_.update(now, length_bytes);
  const double f = f_hat_.rate_bps();

  if (a >= c_ex_) {
    if (!congested_) {
      congested_ = true;
      window_start_ = now;
      r_max_ = 0.0;
      if (alpha_hat_ == 0.0) alpha_hat_ = std::min(r_norm_bps, c_ex_);
    } else if (now > window_start_ + window_) {
      if (f > 0.0) {
        alpha_hat_ *= c_ex_ / f;
      } else {
        ++debug_.fhat_zero_skips;
      }
      window_start_ = now;
      if (alpha_hat_ == 0.0) alpha_hat_ = std::min(r_norm_bps, c_ex_);
    }
  } else {
    if (congested_) {
      congested_ = false;
      window_start_ = now;
      r_max_ = 0.0;
    } else if (now < window_start_ + window_) {
      r_max_ = std::max(r_max_, r_norm_bps);
    } else {
      window_start_ = now;
      alpha_hat_ = r_max_;
      r_max_ = 0.0;
    }
  }
  return alpha_hat_;
}

double CsfqController::refresh_excess_bw() {
  c_ex_ = std::clamp(capacity_ - r_c_.rate_bps(), 0.0, capacity_);
  return c_ex_;
}

void CsfqController::buffer_amendment(std::int64_t occupancy_before, std::int64_t occupancy_after) {
  // Cut whenever a received packet leaves the buffer at or past the
  // threshold, at most once per rate-estimation interval K. The rate limit
  // keeps a hovering level from hammering alpha_hat, while a backlog parked
  // past the threshold keeps taking cuts until it drains below it.
  (void)occupancy_before;
  if (occupancy_after < amendment_threshold_) return;
  if (amendment_cuts_ > 0 && last_packet_time_ < last_cut_time_ + cut_spacing_) return;
  alpha_hat_ *= 1.0 - amendment_factor_;
  ++amendment_cuts_;
  last_cut_time_ = last_packet_time_;
  // Restart the estimation window: the next multiplicative update must
  // divide by post-cut acceptance, not by the average the cut invalidated.
  window_start_ = last_packet_time_;
}

std::uint64_t CsfqController::estimator_zero_dt_clamps() const {
  std::uint64_t n = r_c_.zero_dt_clamps() + a_hat_.zero_dt_clamps() + f_hat_.zero_dt_clamps();
  for (const auto& e : r_nc_) n += e.zero_dt_clamps();
  return n;
}

}  // namespace accessim
