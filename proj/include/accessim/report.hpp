#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "accessim/metrics.hpp"
#include "accessim/scenario.hpp"

namespace accessim {

struct Window {
  SimTime begin{};
  SimTime end{};
};

struct ExperimentOptions {
  std::optional<SchemeId> scheme;        // overrides the scenario's scheme
  std::optional<int> repetitions;        // overrides the scenario's repetitions
  std::optional<std::uint64_t> base_seed;
  SimTime bin_width = SimTime::from_ms(1000);
  std::vector<Window> windows;           // summary windows, bin-aligned
  std::filesystem::path out_dir = ".";
  int jobs = 0;                          // 0 = hardware concurrency
};

struct ExperimentResult {
  SchemeId scheme = SchemeId::kCsfq1Tbm;
  int repetitions = 0;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

// Runs scheme x repetitions and writes, into out_dir:
//   throughput_<scheme>_<rep>.csv   time_s,flow_id,group,throughput_bps
//   summary_<scheme>.csv            window,flow_id,group,mean_bps,ci95_bps,fair_share_bps
//   drops_<scheme>.csv              flow_id,cause,packets,bytes
// Files are written atomically (temp + rename); on failure every file this
// call created is removed and the error rethrown. Identical inputs produce
// byte-identical outputs.
ExperimentResult run_experiment(const ScenarioSpec& spec, const ExperimentOptions& options);

// CSV writers, exposed for tests.
void write_throughput_csv(const std::filesystem::path& path, const RunRecord& record);
void write_summary_csv(const std::filesystem::path& path, const ScenarioSpec& spec,
                       const std::vector<RunRecord>& records, const std::vector<Window>& windows);
void write_drops_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);

}  // namespace accessim
