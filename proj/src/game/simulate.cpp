#include "affectgate/game/simulate.hpp"

#include <stdexcept>

#include "affectgate/rationality/quantal.hpp"

namespace affectgate::game {

std::vector<ChoiceEvent> simulate_player(double lambda, std::span<const RoundSpec> rounds, Rng& rng,
                                         SimulationClock clock) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  std::vector<ChoiceEvent> events;
  events.reserve(rounds.size());
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    const auto& round = rounds[r];
    const auto probs = rationality::quantal_probs(lambda, round_utilities(round));

    const double u = rng.uniform01();
    std::size_t chosen = probs.size() - 1;
    double cumulative = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      cumulative += probs[j];
      if (u < cumulative) {
        chosen = j;
        break;
      }
    }

    const auto outcome = resolve_choice(round, chosen, rng);
    events.push_back(ChoiceEvent{
        .round_index = r,
        .round = round,
        .chosen_gate = chosen,
        .defended = outcome.defended,
        .payoff = outcome.payoff,
        .affect = Affect::none,
        .timestamp = clock.start + clock.step * static_cast<long long>(r),
    });
  }
  return events;
}

std::vector<RoundSpec> cycle_rounds(std::span<const RoundSpec> rounds, std::size_t count) {
  if (rounds.empty() && count > 0) throw std::invalid_argument("cannot cycle an empty round list");
  std::vector<RoundSpec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(rounds[i % rounds.size()]);
  return out;
}

}  // namespace affectgate::game
