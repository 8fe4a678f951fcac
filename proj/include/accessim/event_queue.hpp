#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "accessim/sim_time.hpp"

namespace accessim {

// Single-threaded event loop. Events run in (time, insertion sequence) order,
// so simultaneous events have a total, reproducible order.
class EventQueue {
 public:
  using Action = std::function<void()>;

  SimTime now() const { return now_; }

  void schedule(SimTime at, Action action);
  void schedule_in(SimTime delay, Action action) { schedule(now_ + delay, std::move(action)); }

  // Runs every event with time < horizon, then advances the clock to horizon.
  void run_until(SimTime horizon);

  bool empty() const { return heap_.empty(); }
  std::size_t pending() const { return heap_.size(); }
  std::uint64_t executed() const { return executed_; }

 private:
  struct Ev {
    SimTime at;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Ev& a, const Ev& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::vector<Ev> heap_;
  SimTime now_{};
  std::uint64_t next_seq_ = 0;
  std::uint64_t executed_ = 0;
};

}  // namespace accessim
