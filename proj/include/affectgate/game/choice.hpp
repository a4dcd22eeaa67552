#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "affectgate/core/random.hpp"
#include "affectgate/core/time.hpp"
#include "affectgate/game/gate.hpp"

namespace affectgate::game {

// Opponent affect shown during a round. `none` marks baseline rounds
// against the silent computer opponent.
enum class Affect { negative = 0, positive = 1, none };

std::string_view to_string(Affect affect) noexcept;
// Accepts "negative"/"positive"/"none" and "0"/"1". Throws DataError.
Affect parse_affect(std::string_view text);
// 0 for negative, 1 for positive, nullopt for none.
std::optional<int> affect_indicator(Affect affect) noexcept;

struct Outcome {
  bool defended = false;
  double payoff = 0.0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// One player decision with its board, realized outcome and condition.
struct ChoiceEvent {
  std::uint64_t round_index = 0;
  RoundSpec round;
  std::size_t chosen_gate = 0;
  bool defended = false;
  double payoff = 0.0;
  Affect affect = Affect::none;
  Timestamp timestamp{};

  // Throws DataError if chosen_gate is out of range or payoff is not the
  // chosen gate's reward/penalty as implied by `defended`.
  void validate() const;

  friend bool operator==(const ChoiceEvent&, const ChoiceEvent&) = default;
};

// Draws the defense of the chosen gate as Bernoulli(coverage). Consumes
// exactly one uniform draw whatever gate is chosen.
Outcome resolve_choice(const RoundSpec& round, std::size_t chosen_gate, Rng& rng);

}  // namespace affectgate::game
