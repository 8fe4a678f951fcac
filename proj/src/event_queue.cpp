#include "accessim/event_queue.hpp"

#include <algorithm>
#include <cassert>
#include <utility>

namespace accessim {

void EventQueue::schedule(SimTime at, Action action) {
  assert(at >= now_);
  heap_.push_back(Ev{at, next_seq_++, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
}

void EventQueue::run_until(SimTime horizon) {
  while (!heap_.empty() && heap_.front().at < horizon) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Ev ev = std::move(heap_.back());
    heap_.pop_back();
    assert(ev.at >= now_);
    now_ = ev.at;
    ++executed_;
    ev.action();
  }
  if (now_ < horizon) now_ = horizon;
}

}  // namespace accessim
