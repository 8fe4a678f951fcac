#pragma once

#include <cstdint>

#include "accessim/packet.hpp"
#include "accessim/sim_time.hpp"

namespace accessim {

// Token-bucket conformance meter. Classifies only: packets are never delayed
// or reshaped, and a non-conformant verdict consumes no tokens. Tokens are
// real-valued bytes, refilled lazily at each observation, and the bucket
// starts full.
class TokenBucketMeter {
 public:
  TokenBucketMeter(std::int64_t rate_bps, std::int64_t bucket_bytes, SimTime t0 = SimTime{});

  // Refills for elapsed time, issues the verdict, and stamps p.conformance.
  Conformance meter(Packet& p, SimTime now);

  double tokens() const { return tokens_; }
  std::int64_t rate_bps() const { return rate_bps_; }
  std::int64_t bucket_bytes() const { return bucket_bytes_; }
  SimTime last_update() const { return last_update_; }

 private:
  void refill(SimTime now);

  std::int64_t rate_bps_;
  std::int64_t bucket_bytes_;
  double tokens_;
  SimTime last_update_;
};

}  // namespace accessim
