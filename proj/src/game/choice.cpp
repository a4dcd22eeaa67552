#include "affectgate/game/choice.hpp"

#include <stdexcept>
#include <string>

#include "affectgate/core/error.hpp"

namespace affectgate::game {

std::string_view to_string(Affect affect) noexcept {
  switch (affect) {
    case Affect::negative: return "negative";
    case Affect::positive: return "positive";
    case Affect::none: break;
  }
  return "none";
}

Affect parse_affect(std::string_view text) {
  if (text == "negative" || text == "0") return Affect::negative;
  if (text == "positive" || text == "1") return Affect::positive;
  if (text == "none" || text.empty()) return Affect::none;
  throw DataError("unknown affect '" + std::string(text) + "'");
}

std::optional<int> affect_indicator(Affect affect) noexcept {
  switch (affect) {
    case Affect::negative: return 0;
    case Affect::positive: return 1;
    case Affect::none: break;
  }
  return std::nullopt;
}

void ChoiceEvent::validate() const {
  if (chosen_gate >= round.size())
    throw DataError("round " + std::to_string(round_index) + ": chosen gate " +
                    std::to_string(chosen_gate) + " out of range for " +
                    std::to_string(round.size()) + " gates");
  const auto& g = round[chosen_gate];
  const double expected = defended ? g.penalty() : g.reward();
  if (payoff != expected)
    throw DataError("round " + std::to_string(round_index) + ": payoff " + std::to_string(payoff) +
                    " does not match the chosen gate's " + (defended ? "penalty" : "reward"));
}

Outcome resolve_choice(const RoundSpec& round, std::size_t chosen_gate, Rng& rng) {
  if (chosen_gate >= round.size())
    throw std::out_of_range("gate index " + std::to_string(chosen_gate) + " out of range for " +
                            std::to_string(round.size()) + " gates");
  const auto& g = round[chosen_gate];
  const bool defended = rng.bernoulli(g.coverage());
  return {defended, static_cast<double>(defended ? g.penalty() : g.reward())};
}

}  // namespace affectgate::game
