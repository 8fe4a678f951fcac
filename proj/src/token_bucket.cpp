#include "accessim/token_bucket.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace accessim {

TokenBucketMeter::TokenBucketMeter(std::int64_t rate_bps, std::int64_t bucket_bytes, SimTime t0)
    : rate_bps_(rate_bps),
      bucket_bytes_(bucket_bytes),
      tokens_(static_cast<double>(bucket_bytes)),
      last_update_(t0) {
  if (rate_bps <= 0) throw std::invalid_argument("token rate must be positive");
  if (bucket_bytes <= 0) throw std::invalid_argument("bucket size must be positive");
}

Conformance TokenBucketMeter::meter(Packet& p, SimTime now) {
  assert(p.length > 0);
  assert(now >= last_update_);
  refill(now);
  if (tokens_ >= static_cast<double>(p.length)) {
    tokens_ -= static_cast<double>(p.length);
    p.conformance = Conformance::kConformant;
  } else {
    p.conformance = Conformance::kNonconformant;
  }
  return p.conformance;
}

void TokenBucketMeter::refill(SimTime now) {
  const double dt = (now - last_update_).seconds();
  tokens_ = std::min(static_cast<double>(bucket_bytes_),
                     tokens_ + dt * static_cast<double>(rate_bps_) / 8.0);
  last_update_ = now;
}

}  // namespace accessim
