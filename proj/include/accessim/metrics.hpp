#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "accessim/packet.hpp"
#include "accessim/scenario.hpp"
#include "accessim/sim_time.hpp"

namespace accessim {

enum class DropCause : std::uint8_t { kProb, kOverflow };

struct FlowCounters {
  std::string group;
  std::int64_t token_rate_bps = 0;
  double weight = 0.0;

  std::uint64_t sent_pkts = 0;
  std::uint64_t sent_bytes = 0;
  std::uint64_t delivered_pkts = 0;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t delivered_conformant_bytes = 0;
  std::uint64_t delivered_nonconformant_bytes = 0;
  std::uint64_t dropped_prob_pkts = 0;
  std::uint64_t dropped_prob_bytes = 0;
  std::uint64_t dropped_overflow_pkts = 0;
  std::uint64_t dropped_overflow_bytes = 0;
  std::uint64_t dropped_prob_conformant_pkts = 0;
  std::uint64_t dropped_overflow_conformant_pkts = 0;
  std::uint64_t in_flight_end_pkts = 0;
  std::uint64_t in_flight_end_bytes = 0;
  std::uint64_t inversions = 0;
};

// Everything one repetition produces: per-flow delivery time series binned at
// bin_width, per-flow accounting by cause and conformance class, feeder
// utilization bins, and debug counters. Data packets only; ACKs are excluded.
struct RunRecord {
  SchemeId scheme = SchemeId::kCsfq1Tbm;
  std::uint64_t seed = 0;
  std::uint64_t scenario_digest = 0;
  SimTime bin_width{};
  SimTime horizon{};

  std::vector<FlowCounters> flows;
  std::vector<std::vector<std::uint64_t>> delivered_bytes_bins;  // [flow][bin]
  std::vector<std::vector<std::uint32_t>> inversion_bins;        // [flow][bin]
  std::vector<std::uint64_t> feeder_bytes_bins;                  // [bin]

  // Scheme state sampled at each bin start (CSFQ schemes only; empty for DRR).
  std::vector<double> alpha_hat_bins;
  std::vector<double> excess_bw_bins;
  std::vector<std::int64_t> fifo_occupancy_bins;

  std::int64_t max_fifo_occupancy_bytes = 0;  // shared FIFO (CSFQ schemes only)
  std::uint64_t estimator_zero_dt_clamps = 0;
  std::uint64_t fhat_zero_skips = 0;

  std::size_t bin_count() const;
  std::size_t flow_count() const { return flows.size(); }

  // Order-stable hash over every field; equal digests mean identical records.
  std::uint64_t digest() const;

  // Window queries require bin-aligned bounds inside the horizon.
  std::uint64_t delivered_bytes_in(FlowId flow, SimTime begin, SimTime end) const;
  std::uint64_t inversions_in(FlowId flow, SimTime begin, SimTime end) const;
  double window_throughput_bps(FlowId flow, SimTime begin, SimTime end) const;
  double feeder_utilization(SimTime begin, SimTime end, std::int64_t capacity_bps) const;
};

// Delivered throughput per bin in bits/s; bin_width must be a positive
// multiple of the record's bin width.
std::vector<double> bin_throughput(const RunRecord& record, FlowId flow, SimTime bin_width);

struct WindowStat {
  SimTime begin{};
  SimTime end{};
  int repetitions = 0;
  bool ci_defined = false;  // n >= 2

  std::vector<double> flow_mean_bps;
  std::vector<double> flow_ci95_bps;

  std::vector<std::string> groups;  // distinct labels, first-appearance order
  std::vector<double> group_mean_bps;
  std::vector<double> group_ci95_bps;
};

// Mean window throughput per flow across repetitions with Student-t 95%
// half-widths, plus the same per group (mean over members within each
// repetition, then across repetitions). All records must stem from the same
// scenario and scheme.
WindowStat window_mean_ci(std::span<const RunRecord> records, SimTime begin, SimTime end);

// Two-sided 95% Student-t quantile; exact table for 1..30 degrees of freedom,
// normal approximation beyond.
double student_t_975(int degrees_of_freedom);

// Analytic per-flow fair share for a window starting at window_begin: token
// rate plus the weighted share of the excess, from the scenario alone. Flows
// that have not started by window_begin get 0.
std::vector<double> fair_share_bps(const ScenarioSpec& spec, SimTime window_begin);

}  // namespace accessim
