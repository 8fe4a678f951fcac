#pragma once

#include <cstdint>
#include <vector>

#include "accessim/fifo_queue.hpp"
#include "accessim/packet.hpp"
#include "accessim/rate_estimator.hpp"
#include "accessim/rng.hpp"
#include "accessim/sim_time.hpp"

namespace accessim {

struct CsfqConfig {
  std::int64_t capacity_bps = 0;  // feeder capacity C
  double k_rate_seconds = 0.1;    // K for r_c and r_nc,i
  double k_alpha_seconds = 0.2;   // K_alpha for A-hat, F-hat and the update window
  std::vector<double> weights;    // per subscriber; any uniform scale
  bool amendment_enabled = false;
  std::int64_t amendment_threshold_bytes = 64'000;
  double amendment_factor = 0.09;
};

struct CsfqDebug {
  std::uint64_t fhat_zero_skips = 0;
};

// Weighted CSFQ stage in front of one shared FIFO. Conformant packets pass
// straight through and feed the conformant-rate estimate; non-conformant
// packets are dropped with probability max(0, 1 - alpha_hat * w_i / r_nc,i)
// and drive the fair-rate estimator. Weights are canonicalized so the
// smallest is 1; alpha_hat is then the fair rate per unit of canonical
// weight, and uniformly rescaling the configured weights changes nothing.
class CsfqController {
 public:
  explicit CsfqController(CsfqConfig cfg);

  // Full per-packet path: rate estimation, drop decision, enqueue, and (when
  // enabled) the buffer amendment. The packet must carry a meter verdict.
  EnqueueOutcome on_packet(FifoQueue& fifo, Packet&& p, SimTime now, Rng& rng);

  // Fair-rate estimation from one non-conformant arrival. r_norm is the
  // packet's subscriber non-conformant rate divided by its canonical weight.
  double estimate_alpha(double r_norm_bps, std::int64_t length_bytes, bool dropped, SimTime now);

  // Recomputes and stores C_ex = clamp(C - r_c, 0, C).
  double refresh_excess_bw();

  // Multiplies alpha_hat by (1 - amendment_factor) when the buffer level sits
  // at or past the occupancy threshold, at most once per rate-estimation
  // interval K, and restarts the estimation window so the next multiplicative
  // update measures post-amendment acceptance.
  void buffer_amendment(std::int64_t occupancy_before, std::int64_t occupancy_after);

  double excess_bw_bps() const { return c_ex_; }
  double alpha_hat_bps() const { return alpha_hat_; }
  bool congested() const { return congested_; }
  double r_max_bps() const { return r_max_; }
  double capacity_bps() const { return capacity_; }
  double weight_scale() const { return weight_scale_; }
  double canonical_weight(FlowId i) const { return canonical_weights_[i]; }
  double conformant_rate_bps() const { return r_c_.rate_bps(); }
  double nonconformant_rate_bps(FlowId i) const { return r_nc_[i].rate_bps(); }
  std::size_t subscriber_count() const { return canonical_weights_.size(); }
  std::uint64_t amendment_cuts() const { return amendment_cuts_; }
  const CsfqDebug& debug() const { return debug_; }
  std::uint64_t estimator_zero_dt_clamps() const;

 private:
  double capacity_;
  double c_ex_;
  double alpha_hat_;
  bool congested_ = false;
  bool alpha_started_ = false;
  SimTime window_start_{};
  double r_max_ = 0.0;
  SimTime window_;  // K_alpha as a duration
  SimTime last_packet_time_{};

  ExpAvgEstimator r_c_;
  ExpAvgEstimator a_hat_;
  ExpAvgEstimator f_hat_;
  std::vector<double> canonical_weights_;
  double weight_scale_;
  std::vector<ExpAvgEstimator> r_nc_;

  bool amendment_enabled_;
  std::int64_t amendment_threshold_;
  double amendment_factor_;
  SimTime cut_spacing_;  // minimum time between amendment cuts (= K)
  SimTime last_cut_time_{};
  std::uint64_t amendment_cuts_ = 0;
  CsfqDebug debug_;
};

}  // namespace accessim
