#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "accessim/report.hpp"

using namespace accessim;
namespace fs = std::filesystem;

namespace {

ScenarioSpec tiny_scenario() {
  ScenarioSpec spec = paper_scenario();
  spec.subscribers.resize(2);
  spec.subscribers[1].group = "2";
  spec.subscribers[1].token_rate_bps = 5'000'000;
  spec.subscribers[1].start_time = SimTime::from_seconds(1);
  spec.horizon = SimTime::from_seconds(6);
  spec.repetitions = 2;
  return spec;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ExperimentOptions options_for(const fs::path& dir) {
  ExperimentOptions options;
  options.windows = {{SimTime::from_seconds(2), SimTime::from_seconds(6)}};
  options.out_dir = dir;
  options.jobs = 1;
  return options;
}

}  // namespace

TEST_CASE("run_experiment writes the documented file set") {
  TempDir dir("accessim_report_test");
  const ExperimentResult result = run_experiment(tiny_scenario(), options_for(dir.path));
  CHECK(result.repetitions == 2);
  CHECK(result.files.size() == 4);  // 2 throughput + summary + drops
  CHECK(fs::exists(dir.path / "throughput_csfq1-tbm_0.csv"));
  CHECK(fs::exists(dir.path / "throughput_csfq1-tbm_1.csv"));
  CHECK(fs::exists(dir.path / "summary_csfq1-tbm.csv"));
  CHECK(fs::exists(dir.path / "drops_csfq1-tbm.csv"));

  CHECK(first_line(slurp(dir.path / "throughput_csfq1-tbm_0.csv")) ==
        "time_s,flow_id,group,throughput_bps");
  CHECK(first_line(slurp(dir.path / "summary_csfq1-tbm.csv")) ==
        "window,flow_id,group,mean_bps,ci95_bps,fair_share_bps");
  CHECK(first_line(slurp(dir.path / "drops_csfq1-tbm.csv")) == "flow_id,cause,packets,bytes");

  // Locale-independent decimal points, window labels as begin:end seconds.
  const std::string summary = slurp(dir.path / "summary_csfq1-tbm.csv");
  CHECK(summary.find("2:6,0,1,") != std::string::npos);
  CHECK(summary.find(',') != std::string::npos);
  CHECK(summary.find(';') == std::string::npos);
}

TEST_CASE("rerunning with identical inputs is byte-identical") {
  TempDir a("accessim_report_a");
  TempDir b("accessim_report_b");
  run_experiment(tiny_scenario(), options_for(a.path));
  run_experiment(tiny_scenario(), options_for(b.path));
  for (const char* name : {"throughput_csfq1-tbm_0.csv", "throughput_csfq1-tbm_1.csv",
                           "summary_csfq1-tbm.csv", "drops_csfq1-tbm.csv"}) {
    CHECK(slurp(a.path / name) == slurp(b.path / name));
  }
}

TEST_CASE("a single repetition warns and leaves the CI column empty") {
  TempDir dir("accessim_report_single");
  ExperimentOptions options = options_for(dir.path);
  options.repetitions = 1;
  const ExperimentResult result = run_experiment(tiny_scenario(), options);
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0].find("confidence") != std::string::npos);
  const std::string summary = slurp(dir.path / "summary_csfq1-tbm.csv");
  // mean_bps followed by an empty ci95_bps column.
  CHECK(summary.find(",,") != std::string::npos);
  std::istringstream lines(summary);
  std::string line;
  std::getline(lines, line);  // header
  std::getline(lines, line);
  int commas = 0;
  for (char c : line) commas += c == ',';
  CHECK(commas == 5);
}

TEST_CASE("scheme and repetition overrides take effect") {
  TempDir dir("accessim_report_override");
  ExperimentOptions options = options_for(dir.path);
  options.scheme = SchemeId::kDrrTbm;
  options.repetitions = 3;
  const ExperimentResult result = run_experiment(tiny_scenario(), options);
  CHECK(result.scheme == SchemeId::kDrrTbm);
  CHECK(fs::exists(dir.path / "throughput_drr-tbm_2.csv"));
  CHECK(fs::exists(dir.path / "drops_drr-tbm.csv"));
}
