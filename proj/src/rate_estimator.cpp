#include "accessim/rate_estimator.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace accessim {

ExpAvgEstimator::ExpAvgEstimator(double k_seconds) : k_(k_seconds) {
  if (!(k_seconds > 0.0)) throw std::invalid_argument("averaging constant must be positive");
}

double ExpAvgEstimator::update(SimTime now, std::int64_t length_bytes) {
  assert(length_bytes > 0);
  double t_s;
  if (!last_arrival_) {
    t_s = k_;
  } else {
    assert(now >= *last_arrival_);
    std::int64_t dt = (now - *last_arrival_).ticks();
    if (dt == 0) {
      dt = 1;
      ++zero_dt_clamps_;
    }
    t_s = static_cast<double>(dt) / static_cast<double>(SimTime::kTicksPerSecond);
  }
  const double bits = 8.0 * static_cast<double>(length_bytes);
  const double decay = std::exp(-t_s / k_);
  rate_ = (1.0 - decay) * (bits / t_s) + decay * rate_;
  last_arrival_ = now;
  return rate_;
}

void ExpAvgEstimator::reset(double rate_bps, SimTime last_arrival) {
  rate_ = rate_bps;
  last_arrival_ = last_arrival;
}

}  // namespace accessim
