#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "accessim/sim_time.hpp"

namespace accessim {

enum class SchemeId : std::uint8_t { kDrrTbm, kCsfq1Tbm, kCsfq2Tbm };

inline constexpr std::array<SchemeId, 3> kAllSchemes = {SchemeId::kDrrTbm, SchemeId::kCsfq1Tbm,
                                                        SchemeId::kCsfq2Tbm};

std::string_view to_string(SchemeId scheme);
std::optional<SchemeId> scheme_from_string(std::string_view name);

struct UdpTraffic {
  std::int32_t packet_bytes = 0;
  SimTime period{};
  bool operator==(const UdpTraffic&) const = default;
};

struct TcpTraffic {
  bool operator==(const TcpTraffic&) const = default;
};

using TrafficSpec = std::variant<UdpTraffic, TcpTraffic>;

struct SubscriberSpec {
  int id = -1;
  std::string group;
  std::int64_t token_rate_bps = 0;
  std::int64_t bucket_bytes = 0;
  TrafficSpec source = UdpTraffic{};
  SimTime start_time{};
  bool operator==(const SubscriberSpec&) const = default;
};

// Declarative description of one experiment: topology rates, the scheme under
// test, queue sizes, estimator constants, measurement seeds, and the
// subscriber population. Parsed from the line-oriented `key = value` format
// documented in the README.
struct ScenarioSpec {
  std::int64_t feeder_rate_bps = 0;
  std::int64_t distribution_rate_bps = 0;
  std::int64_t uni_rate_bps = 0;
  std::int64_t backbone_rate_bps = 0;
  SimTime rtt{};
  SimTime horizon{};
  SchemeId scheme = SchemeId::kCsfq1Tbm;
  std::int64_t csfq_fifo_bytes = 0;
  std::int64_t drr_conformant_fifo_bytes = 0;
  std::int64_t drr_subscriber_queue_bytes = 0;
  std::int64_t amendment_threshold_bytes = 0;
  double amendment_factor = 0.0;
  SimTime k{};        // averaging constant for per-flow rates
  SimTime k_alpha{};  // averaging constant and window for the fair rate
  int repetitions = 0;
  std::uint64_t base_seed = 0;
  SimTime start_jitter{};  // optional uniform jitter added to source starts
  std::vector<SubscriberSpec> subscribers;

  bool operator==(const ScenarioSpec&) const = default;

  // Weight of subscriber i: token rate expressed in Mb/s.
  double weight(std::size_t i) const {
    return static_cast<double>(subscribers[i].token_rate_bps) / 1e6;
  }
};

struct ParseError {
  int line = 0;  // 0 when the error is not tied to a specific line
  std::string message;
};

struct ScenarioParseResult {
  std::optional<ScenarioSpec> spec;
  std::vector<ParseError> errors;
  bool ok() const { return spec.has_value() && errors.empty(); }
};

ScenarioParseResult parse_scenario(std::string_view text);

// Canonical serialization; parse(serialize(s)) == s.
std::string serialize_scenario(const ScenarioSpec& spec);

// Hash of the canonical serialization, for pairing runs with their scenario.
std::uint64_t scenario_digest(const ScenarioSpec& spec);

// Cross-field checks shared by the parser and the engine.
std::vector<ParseError> validate_scenario(const ScenarioSpec& spec);

// The built-in 16-subscriber experiment: UDP groups at 16 Mb/s with token
// rates 2.5/5/7.5 Mb/s starting at 0/60/120 s, greedy TCP at 10 Mb/s tokens
// starting at 180 s, 100 Mb/s shared feeder, 240 s horizon.
ScenarioSpec paper_scenario();

}  // namespace accessim
