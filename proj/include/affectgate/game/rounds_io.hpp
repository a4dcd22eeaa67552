#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "affectgate/game/gate.hpp"

namespace affectgate::game {

// Rounds file: line-delimited JSON, one object per round:
//   {"gates": [{"reward": 4, "penalty": -2, "coverage": 0.5}, ...]}
// Blank lines are skipped. Records are numbered from 1 over non-blank lines.
//
// Throws ParseError (malformed JSON or invariant violation, naming the
// record and gate) or DataError("no rounds").
std::vector<RoundSpec> load_rounds(std::istream& in);
std::vector<RoundSpec> load_rounds_file(const std::filesystem::path& path);

void write_rounds(std::ostream& out, std::span<const RoundSpec> rounds);

nlohmann::json round_to_json(const RoundSpec& round, bool include_coverage = true);
// Throws std::invalid_argument / nlohmann::json::exception on bad input.
RoundSpec round_from_json(const nlohmann::json& j);

// Seeded board generator used for the shipped default round set:
// reward in {1..10}, penalty in {-10..-1}, coverage in [0.1, 0.9] rounded
// to two decimals.
std::vector<RoundSpec> generate_rounds(std::uint64_t seed, std::size_t count,
                                       std::size_t gates_per_round = kDefaultGateCount);

}  // namespace affectgate::game
