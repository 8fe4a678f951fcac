#include "accessim/fair_rate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace accessim {

double solve_fair_rate(double excess_bw_bps, std::span<const double> weights,
                       std::span<const double> rates_bps) {
  if (!(excess_bw_bps >= 0.0)) throw std::invalid_argument("excess bandwidth must be nonnegative");
  if (weights.size() != rates_bps.size())
    throw std::invalid_argument("weights and rates must have equal length");
  if (weights.empty()) return 0.0;

  double total_rate = 0.0;
  bool unbounded = false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) throw std::invalid_argument("weights must be positive");
    if (std::isinf(rates_bps[i])) {
      unbounded = true;
    } else if (rates_bps[i] >= 0.0) {
      total_rate += rates_bps[i];
    } else {
      throw std::invalid_argument("rates must be nonnegative");
    }
  }

  if (!unbounded && total_rate <= excess_bw_bps) {
    double alpha = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      alpha = std::max(alpha, rates_bps[i] / weights[i]);
    return alpha;
  }

  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rates_bps[a] / weights[a] < rates_bps[b] / weights[b];
  });

  double remaining = excess_bw_bps;
  double weight_mass = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (std::size_t i : order) {
    const double normalized = rates_bps[i] / weights[i];
    if (normalized * weight_mass <= remaining) {
      remaining -= rates_bps[i];
      weight_mass -= weights[i];
    } else {
      return remaining / weight_mass;
    }
  }
  // Every flow saturated below the fair level; only reachable through
  // floating-point ties with the uncongested test above.
  return rates_bps[order.back()] / weights[order.back()];
}

}  // namespace accessim
