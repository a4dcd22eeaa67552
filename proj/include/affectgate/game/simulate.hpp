#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "affectgate/core/random.hpp"
#include "affectgate/core/time.hpp"
#include "affectgate/game/choice.hpp"

namespace affectgate::game {

struct SimulationClock {
  // Synthetic timestamps keep simulated logs byte-stable: event r gets
  // start + r * step.
  Timestamp start{};
  std::chrono::milliseconds step{1000};
};

// Synthetic quantal-response attacker. For each round a gate is sampled from
// the quantal response over the round's expected utilities, then resolved.
// Events carry affect = none and round_index = position in `rounds`.
std::vector<ChoiceEvent> simulate_player(double lambda, std::span<const RoundSpec> rounds, Rng& rng,
                                         SimulationClock clock = {});

// Repeats `rounds` in order until `count` boards are produced.
std::vector<RoundSpec> cycle_rounds(std::span<const RoundSpec> rounds, std::size_t count);

}  // namespace affectgate::game
