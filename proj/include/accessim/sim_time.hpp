#pragma once

#include <cassert>
#include <cmath>
#include <compare>
#include <cstdint>

namespace accessim {

// Simulation clock, 1 tick = 1 ns. Integer ticks keep event ordering and
// duration arithmetic exact; there is no wall-clock pacing.
class SimTime {
 public:
  static constexpr std::int64_t kTicksPerSecond = 1'000'000'000;

  constexpr SimTime() = default;

  static constexpr SimTime from_ticks(std::int64_t ticks) { return SimTime(ticks); }
  static constexpr SimTime from_ns(std::int64_t ns) { return SimTime(ns); }
  static constexpr SimTime from_us(std::int64_t us) { return SimTime(us * 1'000); }
  static constexpr SimTime from_ms(std::int64_t ms) { return SimTime(ms * 1'000'000); }
  static SimTime from_seconds(double s) {
    return SimTime(static_cast<std::int64_t>(std::llround(s * static_cast<double>(kTicksPerSecond))));
  }

  constexpr std::int64_t ticks() const { return ticks_; }
  constexpr double seconds() const {
    return static_cast<double>(ticks_) / static_cast<double>(kTicksPerSecond);
  }

  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime(a.ticks_ + b.ticks_); }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime(a.ticks_ - b.ticks_); }
  friend constexpr SimTime operator*(SimTime a, std::int64_t k) { return SimTime(a.ticks_ * k); }
  constexpr SimTime& operator+=(SimTime o) {
    ticks_ += o.ticks_;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime o) {
    ticks_ -= o.ticks_;
    return *this;
  }
  friend constexpr auto operator<=>(SimTime, SimTime) = default;

 private:
  explicit constexpr SimTime(std::int64_t ticks) : ticks_(ticks) {}
  std::int64_t ticks_ = 0;
};

// Serialization time of `bytes` at `rate_bps`, rounded up to the next tick so
// a link never finishes early. Error is < 1 tick per conversion.
inline SimTime transmission_time(std::int64_t bytes, std::int64_t rate_bps) {
  assert(bytes >= 0);
  assert(rate_bps > 0);
  const __int128 bit_ticks = static_cast<__int128>(bytes) * 8 * SimTime::kTicksPerSecond;
  const __int128 ticks = (bit_ticks + rate_bps - 1) / rate_bps;
  return SimTime::from_ticks(static_cast<std::int64_t>(ticks));
}

}  // namespace accessim
