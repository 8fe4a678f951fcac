#include "accessim/scenario.hpp"

#include "accessim/traffic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>

namespace accessim {

std::string_view to_string(SchemeId scheme) {
  switch (scheme) {
    case SchemeId::kDrrTbm:
      return "drr-tbm";
    case SchemeId::kCsfq1Tbm:
      return "csfq1-tbm";
    case SchemeId::kCsfq2Tbm:
      return "csfq2-tbm";
  }
  return "unknown";
}

std::optional<SchemeId> scheme_from_string(std::string_view name) {
  for (SchemeId s : kAllSchemes)
    if (name == to_string(s)) return s;
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_number(std::string_view text, std::string_view& suffix) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr == begin) return std::nullopt;
  suffix = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
  return value;
}

struct Unit {
  std::string_view suffix;
  double multiplier;
};

std::optional<std::int64_t> parse_with_units(std::string_view text, std::span<const Unit> units,
                                             bool allow_bare) {
  std::string_view suffix;
  const auto value = parse_number(trim(text), suffix);
  if (!value) return std::nullopt;
  double multiplier = 1.0;
  if (!suffix.empty()) {
    bool found = false;
    for (const Unit& u : units) {
      if (suffix == u.suffix) {
        multiplier = u.multiplier;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  } else if (!allow_bare) {
    return std::nullopt;
  }
  const double scaled = *value * multiplier;
  if (!(std::abs(scaled) < 9.2e18)) return std::nullopt;
  return static_cast<std::int64_t>(std::llround(scaled));
}

constexpr Unit kRateUnits[] = {{"bps", 1.0}, {"kbps", 1e3}, {"Mbps", 1e6}, {"Gbps", 1e9}};
constexpr Unit kSizeUnits[] = {{"B", 1.0}, {"kB", 1e3}, {"MB", 1e6}, {"GB", 1e9}};
constexpr Unit kTimeUnits[] = {{"ns", 1.0}, {"us", 1e3}, {"ms", 1e6}, {"s", 1e9}};

std::optional<std::int64_t> parse_rate_bps(std::string_view text) {
  return parse_with_units(text, kRateUnits, true);
}
std::optional<std::int64_t> parse_size_bytes(std::string_view text) {
  return parse_with_units(text, kSizeUnits, true);
}
std::optional<SimTime> parse_duration(std::string_view text) {
  // Bare numbers are ambiguous for durations; require a unit.
  const auto ticks = parse_with_units(text, kTimeUnits, false);
  if (!ticks) return std::nullopt;
  return SimTime::from_ticks(*ticks);
}

std::optional<double> parse_plain_double(std::string_view text) {
  std::string_view suffix;
  const auto value = parse_number(trim(text), suffix);
  if (!value || !suffix.empty()) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_plain_int(std::string_view text) {
  text = trim(text);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::optional<std::uint64_t> parse_plain_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::optional<TrafficSpec> parse_source(std::string_view text) {
  std::istringstream in{std::string(trim(text))};
  std::string kind;
  in >> kind;
  if (kind == "tcp") {
    std::string rest;
    if (in >> rest) return std::nullopt;
    return TrafficSpec{TcpTraffic{}};
  }
  if (kind == "udp") {
    std::string size_s, period_s, rest;
    if (!(in >> size_s >> period_s) || (in >> rest)) return std::nullopt;
    const auto bytes = parse_size_bytes(size_s);
    const auto period = parse_duration(period_s);
    if (!bytes || *bytes <= 0 || *bytes > std::numeric_limits<std::int32_t>::max() || !period) {
      return std::nullopt;
    }
    return TrafficSpec{UdpTraffic{static_cast<std::int32_t>(*bytes), *period}};
  }
  return std::nullopt;
}

constexpr std::string_view kTopKeys[] = {
    "feeder_rate",       "distribution_rate",   "uni_rate",
    "backbone_rate",     "rtt",                 "horizon",
    "scheme",            "csfq_fifo_capacity",  "drr_conformant_capacity",
    "drr_subscriber_capacity", "amendment_threshold", "amendment_factor",
    "k",                 "k_alpha",             "repetitions",
    "base_seed",         "start_jitter"};

constexpr std::string_view kSubscriberKeys[] = {"id",     "group",      "token_rate",
                                                "bucket_size", "source", "start_time"};

struct PendingSubscriber {
  int block_line = 0;
  std::map<std::string, std::pair<int, std::string>, std::less<>> values;  // key -> (line, value)
};

std::string format_duration(SimTime t) { return std::to_string(t.ticks()) + "ns"; }

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

}  // namespace

ScenarioParseResult parse_scenario(std::string_view text) {
  std::vector<ParseError> errors;
  std::map<std::string, std::pair<int, std::string>, std::less<>> top;  // key -> (line, value)
  std::vector<PendingSubscriber> blocks;
  bool in_subscriber = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line == "[subscriber]") {
        blocks.push_back(PendingSubscriber{line_no, {}});
        in_subscriber = true;
      } else {
        errors.push_back({line_no, "unknown section: " + std::string(line)});
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back({line_no, "expected `key = value`"});
      continue;
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty() || value.empty()) {
      errors.push_back({line_no, "expected `key = value`"});
      continue;
    }

    if (in_subscriber) {
      if (std::find(std::begin(kSubscriberKeys), std::end(kSubscriberKeys), key) ==
          std::end(kSubscriberKeys)) {
        errors.push_back({line_no, "unknown key: " + key});
        continue;
      }
      auto& values = blocks.back().values;
      if (values.contains(key)) {
        errors.push_back({line_no, "duplicate key: " + key});
        continue;
      }
      values.emplace(key, std::make_pair(line_no, value));
    } else {
      if (std::find(std::begin(kTopKeys), std::end(kTopKeys), key) == std::end(kTopKeys)) {
        errors.push_back({line_no, "unknown key: " + key});
        continue;
      }
      if (top.contains(key)) {
        errors.push_back({line_no, "duplicate key: " + key});
        continue;
      }
      top.emplace(key, std::make_pair(line_no, value));
    }
  }

  ScenarioSpec spec;

  const auto missing = [&](std::string_view key) {
    errors.push_back({0, "missing: " + std::string(key)});
  };
  const auto bad = [&](int line, std::string_view key, std::string_view detail) {
    errors.push_back({line, "invalid " + std::string(key) + ": " + std::string(detail)});
  };

  const auto take_rate = [&](std::string_view key, std::int64_t& out) {
    const auto it = top.find(key);
    if (it == top.end()) return missing(key);
    const auto v = parse_rate_bps(it->second.second);
    if (!v) return bad(it->second.first, key, "expected a rate such as 100Mbps");
    if (*v <= 0) return bad(it->second.first, key, "rate must be positive");
    out = *v;
  };
  const auto take_size = [&](std::string_view key, std::int64_t& out) {
    const auto it = top.find(key);
    if (it == top.end()) return missing(key);
    const auto v = parse_size_bytes(it->second.second);
    if (!v) return bad(it->second.first, key, "expected a size such as 1MB");
    if (*v <= 0) return bad(it->second.first, key, "size must be positive");
    out = *v;
  };
  const auto take_duration = [&](std::string_view key, SimTime& out, bool required) {
    const auto it = top.find(key);
    if (it == top.end()) {
      if (required) missing(key);
      return;
    }
    const auto v = parse_duration(it->second.second);
    if (!v) return bad(it->second.first, key, "expected a duration such as 100ms");
    if (v->ticks() < 0) return bad(it->second.first, key, "duration must be nonnegative");
    out = *v;
  };

  take_rate("feeder_rate", spec.feeder_rate_bps);
  take_rate("distribution_rate", spec.distribution_rate_bps);
  take_rate("uni_rate", spec.uni_rate_bps);
  take_rate("backbone_rate", spec.backbone_rate_bps);
  take_duration("rtt", spec.rtt, true);
  take_duration("horizon", spec.horizon, true);

  if (const auto it = top.find("scheme"); it == top.end()) {
    missing("scheme");
  } else if (const auto s = scheme_from_string(it->second.second); !s) {
    bad(it->second.first, "scheme", "must be one of drr-tbm, csfq1-tbm, csfq2-tbm");
  } else {
    spec.scheme = *s;
  }

  take_size("csfq_fifo_capacity", spec.csfq_fifo_bytes);
  take_size("drr_conformant_capacity", spec.drr_conformant_fifo_bytes);
  take_size("drr_subscriber_capacity", spec.drr_subscriber_queue_bytes);
  take_size("amendment_threshold", spec.amendment_threshold_bytes);

  if (const auto it = top.find("amendment_factor"); it == top.end()) {
    missing("amendment_factor");
  } else if (const auto v = parse_plain_double(it->second.second);
             !v || *v < 0.0 || *v >= 1.0) {
    bad(it->second.first, "amendment_factor", "expected a fraction in [0, 1)");
  } else {
    spec.amendment_factor = *v;
  }

  take_duration("k", spec.k, true);
  take_duration("k_alpha", spec.k_alpha, true);

  if (const auto it = top.find("repetitions"); it == top.end()) {
    missing("repetitions");
  } else if (const auto v = parse_plain_int(it->second.second); !v || *v < 1) {
    bad(it->second.first, "repetitions", "expected a positive integer");
  } else {
    spec.repetitions = static_cast<int>(*v);
  }

  if (const auto it = top.find("base_seed"); it == top.end()) {
    missing("base_seed");
  } else if (const auto v = parse_plain_u64(it->second.second); !v) {
    bad(it->second.first, "base_seed", "expected an unsigned integer");
  } else {
    spec.base_seed = *v;
  }

  take_duration("start_jitter", spec.start_jitter, false);

  int next_default_id = 0;
  for (const auto& block : blocks) {
    SubscriberSpec sub;
    bool block_ok = true;
    const auto require = [&](std::string_view key) -> const std::pair<int, std::string>* {
      const auto it = block.values.find(key);
      if (it == block.values.end()) {
        errors.push_back({block.block_line, "subscriber missing: " + std::string(key)});
        block_ok = false;
        return nullptr;
      }
      return &it->second;
    };

    if (const auto* v = require("group")) sub.group = v->second;
    if (const auto* v = require("token_rate")) {
      if (const auto rate = parse_rate_bps(v->second); !rate || *rate <= 0) {
        bad(v->first, "token_rate", "rate must be positive");
        block_ok = false;
      } else {
        sub.token_rate_bps = *rate;
      }
    }
    if (const auto* v = require("bucket_size")) {
      if (const auto size = parse_size_bytes(v->second); !size || *size <= 0) {
        bad(v->first, "bucket_size", "size must be positive");
        block_ok = false;
      } else {
        sub.bucket_bytes = *size;
      }
    }
    if (const auto* v = require("source")) {
      if (const auto src = parse_source(v->second); !src) {
        bad(v->first, "source", "expected `udp <size> <period>` or `tcp`");
        block_ok = false;
      } else {
        sub.source = *src;
      }
    }
    if (const auto* v = require("start_time")) {
      if (const auto t = parse_duration(v->second); !t || t->ticks() < 0) {
        bad(v->first, "start_time", "expected a nonnegative duration");
        block_ok = false;
      } else {
        sub.start_time = *t;
      }
    }
    if (const auto it = block.values.find("id"); it != block.values.end()) {
      if (const auto id = parse_plain_int(it->second.second); !id || *id < 0) {
        bad(it->second.first, "id", "expected a nonnegative integer");
        block_ok = false;
      } else {
        sub.id = static_cast<int>(*id);
      }
    } else {
      sub.id = next_default_id;
    }
    ++next_default_id;
    if (block_ok) spec.subscribers.push_back(std::move(sub));
  }

  // Duplicate-id detection, anchored to the offending block.
  std::set<int> seen_ids;
  for (std::size_t i = 0; i < spec.subscribers.size(); ++i) {
    if (!seen_ids.insert(spec.subscribers[i].id).second) {
      const int line = i < blocks.size() ? blocks[i].block_line : 0;
      errors.push_back(
          {line, "duplicate subscriber id: " + std::to_string(spec.subscribers[i].id)});
    }
  }

  if (!errors.empty()) return {std::nullopt, std::move(errors)};

  auto semantic = validate_scenario(spec);
  if (!semantic.empty()) return {std::nullopt, std::move(semantic)};
  return {std::move(spec), {}};
}

std::vector<ParseError> validate_scenario(const ScenarioSpec& spec) {
  std::vector<ParseError> errors;
  const auto err = [&](std::string message) { errors.push_back({0, std::move(message)}); };

  if (spec.feeder_rate_bps <= 0 || spec.distribution_rate_bps <= 0 || spec.uni_rate_bps <= 0 ||
      spec.backbone_rate_bps <= 0) {
    err("all link rates must be positive");
  }
  if (spec.rtt.ticks() <= 0) err("rtt must be positive");
  if (spec.rtt < SimTime::from_us(400)) err("rtt must be at least 0.4ms (access-side budget)");
  if (spec.horizon.ticks() <= 0) err("horizon must be positive");
  if (spec.csfq_fifo_bytes <= 0 || spec.drr_conformant_fifo_bytes <= 0 ||
      spec.drr_subscriber_queue_bytes <= 0) {
    err("all queue capacities must be positive");
  }
  if (spec.amendment_threshold_bytes <= 0) err("amendment_threshold must be positive");
  if (spec.amendment_factor < 0.0 || spec.amendment_factor >= 1.0)
    err("amendment_factor must be in [0, 1)");
  if (spec.k.ticks() <= 0 || spec.k_alpha.ticks() <= 0) err("averaging constants must be positive");
  if (spec.repetitions < 1) err("repetitions must be at least 1");
  if (spec.start_jitter.ticks() < 0) err("start_jitter must be nonnegative");
  if (spec.subscribers.empty()) err("at least one subscriber required");

  SimTime max_start{};
  for (const auto& sub : spec.subscribers) {
    max_start = std::max(max_start, sub.start_time);
    if (sub.token_rate_bps <= 0) err("subscriber token rate must be positive");
    std::int64_t max_packet = kTcpSegmentBytes;
    if (const auto* udp = std::get_if<UdpTraffic>(&sub.source)) {
      max_packet = udp->packet_bytes;
      if (udp->packet_bytes <= 0) err("udp packet size must be positive");
      if (udp->period.ticks() <= 0) err("udp period must be positive");
    }
    if (sub.bucket_bytes <= max_packet) {
      err("bucket_size must exceed the largest packet (subscriber " + std::to_string(sub.id) +
          ")");
    }
  }
  if (!spec.subscribers.empty() && spec.horizon <= max_start + spec.start_jitter)
    err("horizon must exceed every source start time");
  return errors;
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  std::string out;
  const auto kv = [&](std::string_view key, std::string value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  kv("feeder_rate", std::to_string(spec.feeder_rate_bps) + "bps");
  kv("distribution_rate", std::to_string(spec.distribution_rate_bps) + "bps");
  kv("uni_rate", std::to_string(spec.uni_rate_bps) + "bps");
  kv("backbone_rate", std::to_string(spec.backbone_rate_bps) + "bps");
  kv("rtt", format_duration(spec.rtt));
  kv("horizon", format_duration(spec.horizon));
  kv("scheme", std::string(to_string(spec.scheme)));
  kv("csfq_fifo_capacity", std::to_string(spec.csfq_fifo_bytes) + "B");
  kv("drr_conformant_capacity", std::to_string(spec.drr_conformant_fifo_bytes) + "B");
  kv("drr_subscriber_capacity", std::to_string(spec.drr_subscriber_queue_bytes) + "B");
  kv("amendment_threshold", std::to_string(spec.amendment_threshold_bytes) + "B");
  kv("amendment_factor", format_double(spec.amendment_factor));
  kv("k", format_duration(spec.k));
  kv("k_alpha", format_duration(spec.k_alpha));
  kv("repetitions", std::to_string(spec.repetitions));
  kv("base_seed", std::to_string(spec.base_seed));
  kv("start_jitter", format_duration(spec.start_jitter));
  for (const auto& sub : spec.subscribers) {
    out += "\n[subscriber]\n";
    kv("id", std::to_string(sub.id));
    kv("group", sub.group);
    kv("token_rate", std::to_string(sub.token_rate_bps) + "bps");
    kv("bucket_size", std::to_string(sub.bucket_bytes) + "B");
    if (const auto* udp = std::get_if<UdpTraffic>(&sub.source)) {
      kv("source", "udp " + std::to_string(udp->packet_bytes) + "B " +
                       format_duration(udp->period));
    } else {
      kv("source", "tcp");
    }
    kv("start_time", format_duration(sub.start_time));
  }
  return out;
}

std::uint64_t scenario_digest(const ScenarioSpec& spec) {
  const std::string canonical = serialize_scenario(spec);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

ScenarioSpec paper_scenario() {
  ScenarioSpec spec;
  spec.feeder_rate_bps = 100'000'000;
  spec.distribution_rate_bps = 100'000'000;
  spec.uni_rate_bps = 100'000'000;
  spec.backbone_rate_bps = 10'000'000'000;
  spec.rtt = SimTime::from_ms(10);
  spec.horizon = SimTime::from_seconds(240);
  spec.scheme = SchemeId::kCsfq1Tbm;
  spec.csfq_fifo_bytes = 16'000'000;
  spec.drr_conformant_fifo_bytes = 1'000'000;
  spec.drr_subscriber_queue_bytes = 1'000'000;
  spec.amendment_threshold_bytes = 64'000;
  spec.amendment_factor = 0.09;
  spec.k = SimTime::from_ms(100);
  spec.k_alpha = SimTime::from_ms(200);
  spec.repetitions = 10;
  spec.base_seed = 1;

  struct Group {
    const char* label;
    std::int64_t token_rate_bps;
    SimTime start;
    bool tcp;
  };
  const Group groups[] = {
      {"1", 2'500'000, SimTime::from_seconds(0), false},
      {"2", 5'000'000, SimTime::from_seconds(60), false},
      {"3", 7'500'000, SimTime::from_seconds(120), false},
      {"4", 10'000'000, SimTime::from_seconds(180), true},
  };
  int id = 0;
  for (const Group& g : groups) {
    for (int member = 0; member < 4; ++member) {
      SubscriberSpec sub;
      sub.id = id++;
      sub.group = g.label;
      sub.token_rate_bps = g.token_rate_bps;
      sub.bucket_bytes = 1'000'000;
      sub.start_time = g.start;
      if (g.tcp) {
        sub.source = TcpTraffic{};
      } else {
        sub.source = UdpTraffic{1000, SimTime::from_us(500)};
      }
      spec.subscribers.push_back(std::move(sub));
    }
  }
  return spec;
}

}  // namespace accessim
