#include "affectgate/game/gate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace affectgate::game {

GateSpec::GateSpec(int reward, int penalty, double coverage)
    : reward_(reward), penalty_(penalty), coverage_(coverage) {
  if (reward < 0) throw std::invalid_argument("gate reward must be >= 0, got " + std::to_string(reward));
  if (penalty > 0) throw std::invalid_argument("gate penalty must be <= 0, got " + std::to_string(penalty));
  if (!(coverage >= 0.0 && coverage <= 1.0))
    throw std::invalid_argument("gate coverage must be in [0, 1], got " + std::to_string(coverage));
}

RoundSpec::RoundSpec(std::vector<GateSpec> gates) : gates_(std::move(gates)) {
  if (gates_.size() < 2)
    throw std::invalid_argument("a round needs at least 2 gates, got " + std::to_string(gates_.size()));
}

double expected_utility(const GateSpec& gate) noexcept {
  const double p = gate.coverage();
  return (1.0 - p) * gate.reward() + p * gate.penalty();
}

std::vector<double> round_utilities(const RoundSpec& round) {
  std::vector<double> out;
  out.reserve(round.size());
  for (const auto& g : round.gates()) out.push_back(expected_utility(g));
  return out;
}

}  // namespace affectgate::game
