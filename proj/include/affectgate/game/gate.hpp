#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace affectgate::game {

inline constexpr std::size_t kDefaultGateCount = 8;

// One attackable gate: the attacker's reward if the gate is undefended, the
// (nonpositive) penalty if it is defended, and the defender's coverage.
class GateSpec {
 public:
  // Throws std::invalid_argument unless reward >= 0, penalty <= 0 and
  // coverage is in [0, 1].
  GateSpec(int reward, int penalty, double coverage);

  int reward() const noexcept { return reward_; }
  int penalty() const noexcept { return penalty_; }
  double coverage() const noexcept { return coverage_; }

  friend bool operator==(const GateSpec&, const GateSpec&) = default;

 private:
  int reward_;
  int penalty_;
  double coverage_;
};

// The board presented in one round. Holds at least two gates.
class RoundSpec {
 public:
  explicit RoundSpec(std::vector<GateSpec> gates);

  std::span<const GateSpec> gates() const noexcept { return gates_; }
  std::size_t size() const noexcept { return gates_.size(); }
  const GateSpec& operator[](std::size_t j) const { return gates_.at(j); }

  friend bool operator==(const RoundSpec&, const RoundSpec&) = default;

 private:
  std::vector<GateSpec> gates_;
};

// (1 - p) R + p P
double expected_utility(const GateSpec& gate) noexcept;

std::vector<double> round_utilities(const RoundSpec& round);

}  // namespace affectgate::game
