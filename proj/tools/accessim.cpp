#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "accessim/report.hpp"
#include "accessim/scenario.hpp"

namespace {

std::optional<std::vector<accessim::Window>> parse_windows(const std::string& text) {
  std::vector<accessim::Window> windows;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) return std::nullopt;
    try {
      const double a = std::stod(item.substr(0, colon));
      const double b = std::stod(item.substr(colon + 1));
      if (!(a >= 0.0) || !(b > a)) return std::nullopt;
      windows.push_back({accessim::SimTime::from_seconds(a), accessim::SimTime::from_seconds(b)});
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return windows.empty() ? std::nullopt : std::make_optional(windows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accessim: shared-access-network traffic control simulator"};

  std::string scenario_path;
  std::string scheme_name;
  int repetitions = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double bin_width_s = 1.0;
  std::string out_dir = ".";
  std::string windows_text = "130:180,190:240";
  int jobs = 0;

  app.add_option("--scenario", scenario_path, "Scenario file")->required();
  app.add_option("--scheme", scheme_name, "Scheme: drr-tbm, csfq1-tbm or csfq2-tbm");
  app.add_option("--reps", repetitions, "Number of repetitions");
  app.add_option("--seed", seed, "Base seed (repetition r uses seed + r)")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--bin-width", bin_width_s, "Throughput bin width in seconds");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--windows", windows_text, "Summary windows, e.g. 130:180,190:240");
  app.add_option("--jobs", jobs, "Worker threads for repetitions (0 = auto)");

  CLI11_PARSE(app, argc, argv);

  std::ifstream in(scenario_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << scenario_path << "\n";
    return 1;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  const accessim::ScenarioParseResult parsed = accessim::parse_scenario(buffer.str());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) {
      if (e.line > 0) {
        std::cerr << scenario_path << ":" << e.line << ": " << e.message << "\n";
      } else {
        std::cerr << scenario_path << ": " << e.message << "\n";
      }
    }
    return 2;
  }

  accessim::ExperimentOptions options;
  if (!scheme_name.empty()) {
    const auto scheme = accessim::scheme_from_string(scheme_name);
    if (!scheme) {
      std::cerr << "error: scheme must be one of drr-tbm, csfq1-tbm, csfq2-tbm\n";
      return 2;
    }
    options.scheme = *scheme;
  }
  if (repetitions > 0) options.repetitions = repetitions;
  if (seed_set) options.base_seed = seed;
  if (!(bin_width_s > 0.0)) {
    std::cerr << "error: --bin-width must be positive\n";
    return 2;
  }
  options.bin_width = accessim::SimTime::from_seconds(bin_width_s);
  const auto windows = parse_windows(windows_text);
  if (!windows) {
    std::cerr << "error: --windows must look like 130:180,190:240\n";
    return 2;
  }
  options.windows = *windows;
  options.out_dir = out_dir;
  options.jobs = jobs;

  try {
    const accessim::ExperimentResult result = accessim::run_experiment(*parsed.spec, options);
    for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
    for (const auto& file : result.files) std::cout << file.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
