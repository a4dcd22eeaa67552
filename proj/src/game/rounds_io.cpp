#include "affectgate/game/rounds_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "affectgate/core/error.hpp"
#include "affectgate/core/random.hpp"

namespace affectgate::game {

namespace {

int integer_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw std::invalid_argument(std::string(key) + " must be an integer");
  return v.get<int>();
}

}  // namespace

nlohmann::json round_to_json(const RoundSpec& round, bool include_coverage) {
  auto gates = nlohmann::json::array();
  for (const auto& g : round.gates()) {
    nlohmann::json jg{{"reward", g.reward()}, {"penalty", g.penalty()}};
    if (include_coverage) jg["coverage"] = g.coverage();
    gates.push_back(std::move(jg));
  }
  return {{"gates", std::move(gates)}};
}

RoundSpec round_from_json(const nlohmann::json& j) {
  const auto& gates = j.at("gates");
  if (!gates.is_array()) throw std::invalid_argument("\"gates\" must be an array");
  std::vector<GateSpec> out;
  out.reserve(gates.size());
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    try {
      const auto& cov = g.at("coverage");
      if (!cov.is_number()) throw std::invalid_argument("coverage must be a number");
      out.emplace_back(integer_field(g, "reward"), integer_field(g, "penalty"), cov.get<double>());
    } catch (const std::exception& e) {
      throw std::invalid_argument("gate " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return RoundSpec(std::move(out));
}

std::vector<RoundSpec> load_rounds(std::istream& in) {
  std::vector<RoundSpec> rounds;
  std::string line;
  std::size_t line_no = 0;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++record;
    const std::string where = "record " + std::to_string(record);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, where + ": malformed JSON: " + e.what());
    }
    try {
      rounds.push_back(round_from_json(j));
    } catch (const std::exception& e) {
      throw ParseError(line_no, where + ": " + e.what());
    }
  }
  if (rounds.empty()) throw DataError("no rounds");
  return rounds;
}

std::vector<RoundSpec> load_rounds_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rounds file " + path.string());
  try {
    return load_rounds(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.message());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_rounds(std::ostream& out, std::span<const RoundSpec> rounds) {
  for (const auto& r : rounds) out << round_to_json(r).dump() << '\n';
}

std::vector<RoundSpec> generate_rounds(std::uint64_t seed, std::size_t count,
                                       std::size_t gates_per_round) {
  Rng rng(seed);
  std::vector<RoundSpec> rounds;
  rounds.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    std::vector<GateSpec> gates;
    gates.reserve(gates_per_round);
    for (std::size_t j = 0; j < gates_per_round; ++j) {
      const int reward = 1 + static_cast<int>(rng.index(10));
      const int penalty = -1 - static_cast<int>(rng.index(10));
      const double coverage = std::round((0.1 + 0.8 * rng.uniform01()) * 100.0) / 100.0;
      gates.emplace_back(reward, penalty, coverage);
    }
    rounds.emplace_back(std::move(gates));
  }
  return rounds;
}

}  // namespace affectgate::game
