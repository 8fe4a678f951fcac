#include "accessim/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "accessim/engine.hpp"

namespace accessim {
namespace {

// Locale-independent fixed-point formatting.
std::string fixed(double value, int precision) {
  char buf[64];
  const auto result =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, precision);
  if (result.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, result.ptr);
}

std::string window_label(const Window& w) {
  const auto seconds = [](SimTime t) {
    std::string s = fixed(t.seconds(), 3);
    while (s.ends_with('0')) s.pop_back();
    if (s.ends_with('.')) s.pop_back();
    return s;
  };
  return seconds(w.begin) + ":" + seconds(w.end);
}

class AtomicFileSet {
 public:
  explicit AtomicFileSet(std::vector<std::filesystem::path>& created) : created_(created) {}

  void write(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open " + tmp.string());
      out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
      if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
    created_.push_back(path);
  }

 private:
  std::vector<std::filesystem::path>& created_;
};

std::string throughput_csv(const RunRecord& record) {
  std::string out = "time_s,flow_id,group,throughput_bps\n";
  const std::size_t bins = record.bin_count();
  const double width_s = record.bin_width.seconds();
  for (std::size_t k = 0; k < bins; ++k) {
    const double t = static_cast<double>(k) * width_s;
    for (std::size_t f = 0; f < record.flow_count(); ++f) {
      const double bps = 8.0 * static_cast<double>(record.delivered_bytes_bins[f][k]) / width_s;
      out += fixed(t, 3);
      out += ',';
      out += std::to_string(f);
      out += ',';
      out += record.flows[f].group;
      out += ',';
      out += fixed(bps, 3);
      out += '\n';
    }
  }
  return out;
}

std::string summary_csv(const ScenarioSpec& spec, const std::vector<RunRecord>& records,
                        const std::vector<Window>& windows) {
  std::string out = "window,flow_id,group,mean_bps,ci95_bps,fair_share_bps\n";
  for (const Window& w : windows) {
    const WindowStat stat = window_mean_ci(records, w.begin, w.end);
    const std::vector<double> shares = fair_share_bps(spec, w.begin);
    const std::string label = window_label(w);
    for (std::size_t f = 0; f < stat.flow_mean_bps.size(); ++f) {
      out += label;
      out += ',';
      out += std::to_string(f);
      out += ',';
      out += records.front().flows[f].group;
      out += ',';
      out += fixed(stat.flow_mean_bps[f], 3);
      out += ',';
      if (stat.ci_defined) out += fixed(stat.flow_ci95_bps[f], 3);
      out += ',';
      out += fixed(shares[f], 3);
      out += '\n';
    }
    // Group aggregates: mean over members within a repetition, then across
    // repetitions; flow_id left empty.
    for (std::size_t g = 0; g < stat.groups.size(); ++g) {
      double share = 0.0;
      int members = 0;
      for (std::size_t f = 0; f < stat.flow_mean_bps.size(); ++f) {
        if (records.front().flows[f].group == stat.groups[g]) {
          share += shares[f];
          ++members;
        }
      }
      out += label;
      out += ",,";
      out += stat.groups[g];
      out += ',';
      out += fixed(stat.group_mean_bps[g], 3);
      out += ',';
      if (stat.ci_defined) out += fixed(stat.group_ci95_bps[g], 3);
      out += ',';
      out += fixed(share / static_cast<double>(members), 3);
      out += '\n';
    }
  }
  return out;
}

std::string drops_csv(const std::vector<RunRecord>& records) {
  std::string out = "flow_id,cause,packets,bytes\n";
  const std::size_t flows = records.front().flow_count();
  for (std::size_t f = 0; f < flows; ++f) {
    std::uint64_t prob_pkts = 0, prob_bytes = 0, overflow_pkts = 0, overflow_bytes = 0;
    for (const RunRecord& r : records) {
      prob_pkts += r.flows[f].dropped_prob_pkts;
      prob_bytes += r.flows[f].dropped_prob_bytes;
      overflow_pkts += r.flows[f].dropped_overflow_pkts;
      overflow_bytes += r.flows[f].dropped_overflow_bytes;
    }
    out += std::to_string(f) + ",prob," + std::to_string(prob_pkts) + "," +
           std::to_string(prob_bytes) + "\n";
    out += std::to_string(f) + ",overflow," + std::to_string(overflow_pkts) + "," +
           std::to_string(overflow_bytes) + "\n";
  }
  return out;
}

}  // namespace

void write_throughput_csv(const std::filesystem::path& path, const RunRecord& record) {
  std::vector<std::filesystem::path> created;
  AtomicFileSet files(created);
  files.write(path, throughput_csv(record));
}

void write_summary_csv(const std::filesystem::path& path, const ScenarioSpec& spec,
                       const std::vector<RunRecord>& records, const std::vector<Window>& windows) {
  std::vector<std::filesystem::path> created;
  AtomicFileSet files(created);
  files.write(path, summary_csv(spec, records, windows));
}

void write_drops_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  std::vector<std::filesystem::path> created;
  AtomicFileSet files(created);
  files.write(path, drops_csv(records));
}

ExperimentResult run_experiment(const ScenarioSpec& spec, const ExperimentOptions& options) {
  ExperimentResult result;
  result.scheme = options.scheme.value_or(spec.scheme);
  result.repetitions = options.repetitions.value_or(spec.repetitions);
  const std::uint64_t base_seed = options.base_seed.value_or(spec.base_seed);
  if (result.repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (result.repetitions < 2)
    result.warnings.push_back("single repetition: confidence intervals are undefined");

  const std::vector<RunRecord> records = run_repetitions(
      spec, result.scheme, result.repetitions, base_seed, options.bin_width, options.jobs);

  std::filesystem::create_directories(options.out_dir);
  const std::string scheme_name{to_string(result.scheme)};

  std::vector<std::filesystem::path> created;
  AtomicFileSet files(created);
  try {
    for (std::size_t r = 0; r < records.size(); ++r) {
      const auto path =
          options.out_dir / ("throughput_" + scheme_name + "_" + std::to_string(r) + ".csv");
      files.write(path, throughput_csv(records[r]));
    }
    files.write(options.out_dir / ("summary_" + scheme_name + ".csv"),
                summary_csv(spec, records, options.windows));
    files.write(options.out_dir / ("drops_" + scheme_name + ".csv"), drops_csv(records));
  } catch (...) {
    std::error_code ec;
    for (const auto& path : created) std::filesystem::remove(path, ec);
    throw;
  }
  result.files = std::move(created);
  return result;
}

}  // namespace accessim
