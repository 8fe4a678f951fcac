#pragma once

#include <span>

namespace accessim {

// Normalized fair rate alpha for a given excess capacity:
//
//   C_ex = sum_i w_i * min(alpha, r_i / w_i)
//
// solved in closed form by waterfilling: saturate flows whose normalized rate
// sits below the fair level, then split the remaining capacity over the
// remaining weight mass. When total demand fits (sum r_i <= C_ex) the
// uncongested fallback alpha = max_i(r_i / w_i) applies (0 if all rates are
// zero). Rates may be +infinity for demand-unbounded flows.
double solve_fair_rate(double excess_bw_bps, std::span<const double> weights,
                       std::span<const double> rates_bps);

}  // namespace accessim
