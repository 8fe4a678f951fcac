#include "accessim/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "accessim/fair_rate.hpp"

namespace accessim {
namespace {

struct Fnv {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001B3ULL;
    }
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void i64(std::int64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
};

std::size_t window_bin(const RunRecord& r, SimTime t, const char* what) {
  if (r.bin_width.ticks() <= 0) throw std::invalid_argument("record has no bins");
  if (t.ticks() < 0 || t > r.horizon) throw std::invalid_argument("window outside horizon");
  if (t.ticks() % r.bin_width.ticks() != 0)
    throw std::invalid_argument(std::string(what) + " must align to the bin grid");
  return static_cast<std::size_t>(t.ticks() / r.bin_width.ticks());
}

}  // namespace

std::size_t RunRecord::bin_count() const {
  if (bin_width.ticks() <= 0) return 0;
  return static_cast<std::size_t>((horizon.ticks() + bin_width.ticks() - 1) / bin_width.ticks());
}

std::uint64_t RunRecord::digest() const {
  Fnv fnv;
  fnv.u64(static_cast<std::uint64_t>(scheme));
  fnv.u64(seed);
  fnv.u64(scenario_digest);
  fnv.i64(bin_width.ticks());
  fnv.i64(horizon.ticks());
  fnv.u64(flows.size());
  for (const FlowCounters& f : flows) {
    fnv.str(f.group);
    fnv.i64(f.token_rate_bps);
    fnv.f64(f.weight);
    for (std::uint64_t v :
         {f.sent_pkts, f.sent_bytes, f.delivered_pkts, f.delivered_bytes,
          f.delivered_conformant_bytes, f.delivered_nonconformant_bytes, f.dropped_prob_pkts,
          f.dropped_prob_bytes, f.dropped_overflow_pkts, f.dropped_overflow_bytes,
          f.dropped_prob_conformant_pkts, f.dropped_overflow_conformant_pkts, f.in_flight_end_pkts,
          f.in_flight_end_bytes, f.inversions}) {
      fnv.u64(v);
    }
  }
  for (const auto& bins : delivered_bytes_bins)
    for (std::uint64_t v : bins) fnv.u64(v);
  for (const auto& bins : inversion_bins)
    for (std::uint32_t v : bins) fnv.u64(v);
  for (std::uint64_t v : feeder_bytes_bins) fnv.u64(v);
  for (double v : alpha_hat_bins) fnv.f64(v);
  for (double v : excess_bw_bins) fnv.f64(v);
  for (std::int64_t v : fifo_occupancy_bins) fnv.i64(v);
  fnv.i64(max_fifo_occupancy_bytes);
  fnv.u64(estimator_zero_dt_clamps);
  fnv.u64(fhat_zero_skips);
  return fnv.h;
}

std::uint64_t RunRecord::delivered_bytes_in(FlowId flow, SimTime begin, SimTime end) const {
  if (begin >= end) throw std::invalid_argument("empty window");
  const std::size_t k0 = window_bin(*this, begin, "window begin");
  const std::size_t k1 = window_bin(*this, end, "window end");
  std::uint64_t total = 0;
  for (std::size_t k = k0; k < k1; ++k) total += delivered_bytes_bins.at(flow).at(k);
  return total;
}

std::uint64_t RunRecord::inversions_in(FlowId flow, SimTime begin, SimTime end) const {
  if (begin >= end) throw std::invalid_argument("empty window");
  const std::size_t k0 = window_bin(*this, begin, "window begin");
  const std::size_t k1 = window_bin(*this, end, "window end");
  std::uint64_t total = 0;
  for (std::size_t k = k0; k < k1; ++k) total += inversion_bins.at(flow).at(k);
  return total;
}

double RunRecord::window_throughput_bps(FlowId flow, SimTime begin, SimTime end) const {
  const double bytes = static_cast<double>(delivered_bytes_in(flow, begin, end));
  return 8.0 * bytes / (end - begin).seconds();
}

double RunRecord::feeder_utilization(SimTime begin, SimTime end, std::int64_t capacity_bps) const {
  if (begin >= end) throw std::invalid_argument("empty window");
  const std::size_t k0 = window_bin(*this, begin, "window begin");
  const std::size_t k1 = window_bin(*this, end, "window end");
  std::uint64_t bytes = 0;
  for (std::size_t k = k0; k < k1; ++k) bytes += feeder_bytes_bins.at(k);
  return 8.0 * static_cast<double>(bytes) /
         (static_cast<double>(capacity_bps) * (end - begin).seconds());
}

std::vector<double> bin_throughput(const RunRecord& record, FlowId flow, SimTime bin_width) {
  if (bin_width.ticks() <= 0) throw std::invalid_argument("bin width must be positive");
  if (record.bin_width.ticks() <= 0) throw std::invalid_argument("record has no bins");
  if (bin_width.ticks() % record.bin_width.ticks() != 0)
    throw std::invalid_argument("bin width must be a multiple of the record bin width");
  const std::size_t merge = static_cast<std::size_t>(bin_width.ticks() / record.bin_width.ticks());
  const auto& bins = record.delivered_bytes_bins.at(flow);
  const double width_s = bin_width.seconds();
  std::vector<double> series((bins.size() + merge - 1) / merge, 0.0);
  for (std::size_t k = 0; k < bins.size(); ++k)
    series[k / merge] += static_cast<double>(bins[k]);
  for (double& v : series) v = 8.0 * v / width_s;
  return series;
}

double student_t_975(int degrees_of_freedom) {
  static constexpr double kTable[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (degrees_of_freedom < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
  if (degrees_of_freedom <= 30) return kTable[degrees_of_freedom - 1];
  return 1.960;
}

WindowStat window_mean_ci(std::span<const RunRecord> records, SimTime begin, SimTime end) {
  if (records.empty()) throw std::invalid_argument("at least one record required");
  const std::size_t flows = records.front().flow_count();
  for (const RunRecord& r : records) {
    if (r.scheme != records.front().scheme || r.scenario_digest != records.front().scenario_digest)
      throw std::invalid_argument("records stem from different experiments");
    if (r.flow_count() != flows) throw std::invalid_argument("records disagree on flow count");
  }

  WindowStat stat;
  stat.begin = begin;
  stat.end = end;
  stat.repetitions = static_cast<int>(records.size());
  stat.ci_defined = records.size() >= 2;
  const double n = static_cast<double>(records.size());
  const double t = stat.ci_defined ? student_t_975(static_cast<int>(records.size()) - 1) : 0.0;

  const auto mean_ci = [&](const std::vector<double>& samples, double& mean, double& ci) {
    mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    ci = 0.0;
    if (stat.ci_defined) {
      double ss = 0.0;
      for (double v : samples) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / (n - 1.0));
      ci = t * sd / std::sqrt(n);
    }
  };

  stat.flow_mean_bps.resize(flows);
  stat.flow_ci95_bps.resize(flows);
  std::vector<double> samples(records.size());
  for (std::size_t f = 0; f < flows; ++f) {
    for (std::size_t r = 0; r < records.size(); ++r)
      samples[r] = records[r].window_throughput_bps(static_cast<FlowId>(f), begin, end);
    mean_ci(samples, stat.flow_mean_bps[f], stat.flow_ci95_bps[f]);
  }

  for (std::size_t f = 0; f < flows; ++f) {
    const std::string& g = records.front().flows[f].group;
    if (std::find(stat.groups.begin(), stat.groups.end(), g) == stat.groups.end())
      stat.groups.push_back(g);
  }
  for (const std::string& g : stat.groups) {
    for (std::size_t r = 0; r < records.size(); ++r) {
      double sum = 0.0;
      int members = 0;
      for (std::size_t f = 0; f < flows; ++f) {
        if (records.front().flows[f].group == g) {
          sum += records[r].window_throughput_bps(static_cast<FlowId>(f), begin, end);
          ++members;
        }
      }
      samples[r] = sum / static_cast<double>(members);
    }
    double mean = 0.0;
    double ci = 0.0;
    mean_ci(samples, mean, ci);
    stat.group_mean_bps.push_back(mean);
    stat.group_ci95_bps.push_back(ci);
  }
  return stat;
}

std::vector<double> fair_share_bps(const ScenarioSpec& spec, SimTime window_begin) {
  const std::size_t n = spec.subscribers.size();
  std::vector<double> shares(n, 0.0);
  std::vector<std::size_t> active;
  std::vector<double> weights;
  std::vector<double> nonconformant;
  std::vector<double> conformant(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const SubscriberSpec& sub = spec.subscribers[i];
    if (sub.start_time > window_begin) continue;
    const double token = static_cast<double>(sub.token_rate_bps);
    double offered;
    if (const auto* udp = std::get_if<UdpTraffic>(&sub.source)) {
      offered = 8.0 * static_cast<double>(udp->packet_bytes) / udp->period.seconds();
    } else {
      offered = std::numeric_limits<double>::infinity();  // greedy
    }
    conformant[i] = std::min(offered, token);
    active.push_back(i);
    weights.push_back(spec.weight(i));
    nonconformant.push_back(offered - conformant[i]);
  }
  if (active.empty()) return shares;

  double conformant_total = 0.0;
  for (std::size_t i : active) conformant_total += conformant[i];
  const double c_ex =
      std::max(0.0, static_cast<double>(spec.feeder_rate_bps) - conformant_total);
  const double alpha = solve_fair_rate(c_ex, weights, nonconformant);

  for (std::size_t k = 0; k < active.size(); ++k) {
    const std::size_t i = active[k];
    const double excess = weights[k] * std::min(alpha, nonconformant[k] / weights[k]);
    shares[i] = conformant[i] + excess;
  }
  return shares;
}

}  // namespace accessim
