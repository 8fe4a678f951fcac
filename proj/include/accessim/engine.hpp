#pragma once

#include <cstdint>
#include <vector>

#include "accessim/metrics.hpp"
#include "accessim/scenario.hpp"
#include "accessim/sim_time.hpp"

namespace accessim {

// Runs one repetition: server -> backbone -> access switch (meters plus the
// scheme under test on the feeder link) -> distribution switch -> subscriber
// UNIs, with ACKs returning over a fixed-delay reverse path. Throws
// std::invalid_argument for an invalid scenario before any event executes.
RunRecord run_simulation(const ScenarioSpec& spec, SchemeId scheme, std::uint64_t seed,
                         SimTime bin_width = SimTime::from_ms(1000));

// Repetition r uses seed base_seed + r. Repetitions are independent and may
// run on worker threads (jobs = 0 picks the hardware concurrency); results
// are returned in repetition order regardless.
std::vector<RunRecord> run_repetitions(const ScenarioSpec& spec, SchemeId scheme, int repetitions,
                                       std::uint64_t base_seed,
                                       SimTime bin_width = SimTime::from_ms(1000), int jobs = 0);

}  // namespace accessim
