#pragma once

#include <cstdint>
#include <optional>

#include "accessim/sim_time.hpp"

namespace accessim {

// Exponentially averaged rate estimate,
//
//   rate <- (1 - e^(-T/K)) * l/T + e^(-T/K) * rate
//
// with T the interarrival time in seconds and l the packet size in bits.
// The first update uses T = K, so the estimate starts at (1 - 1/e) * l/K
// instead of dividing by an unset interval. Two updates on the same tick
// clamp T to one tick and are counted.
class ExpAvgEstimator {
 public:
  explicit ExpAvgEstimator(double k_seconds);

  double update(SimTime now, std::int64_t length_bytes);

  double rate_bps() const { return rate_; }
  double k_seconds() const { return k_; }
  std::optional<SimTime> last_arrival() const { return last_arrival_; }
  std::uint64_t zero_dt_clamps() const { return zero_dt_clamps_; }

  // Sets the estimate and the interarrival clock directly.
  void reset(double rate_bps, SimTime last_arrival);

 private:
  double k_;
  double rate_ = 0.0;
  std::optional<SimTime> last_arrival_;
  std::uint64_t zero_dt_clamps_ = 0;
};

}  // namespace accessim
