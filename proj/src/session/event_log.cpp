#include "affectgate/session/event_log.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "affectgate/core/error.hpp"
#include "affectgate/game/rounds_io.hpp"

namespace affectgate::session {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::practice: return "practice";
    case Phase::main: return "main";
    case Phase::finished: return "finished";
  }
  return "unknown";
}

Phase parse_phase(std::string_view text) {
  if (text == "practice") return Phase::practice;
  if (text == "main") return Phase::main;
  if (text == "finished") return Phase::finished;
  throw DataError("unknown phase '" + std::string(text) + "'");
}

ordered_json record_to_json(const LogRecord& record) {
  ordered_json j;
  j["seq"] = record.seq;
  if (record.is_choice()) {
    const auto& [phase, e] = record.choice();
    j["type"] = "choice";
    j["ts"] = format_iso8601(e.timestamp);
    j["round_index"] = e.round_index;
    j["phase"] = to_string(phase);
    auto gates = ordered_json::array();
    for (const auto& g : e.round.gates())
      gates.push_back({{"reward", g.reward()}, {"penalty", g.penalty()}, {"coverage", g.coverage()}});
    j["gates"] = std::move(gates);
    j["chosen"] = e.chosen_gate;
    j["defended"] = e.defended;
    j["payoff"] = e.payoff;
    j["affect"] = game::to_string(e.affect);
  } else {
    const auto& u = record.utterance();
    j["type"] = "utterance";
    j["ts"] = format_iso8601(u.timestamp);
    j["round_index"] = u.round_index;
    j["affect"] = game::to_string(u.affect);
    j["text"] = u.text;
  }
  return j;
}

std::string format_record(const LogRecord& record) { return record_to_json(record).dump(); }

namespace {

LogRecord parse_json_record(const json& j) {
  const auto seq = j.at("seq").get<std::uint64_t>();
  if (seq == 0) throw DataError("seq must be >= 1");
  const auto type = j.at("type").get<std::string>();
  const auto ts = parse_iso8601(j.at("ts").get<std::string>());
  const auto round_index = j.at("round_index").get<std::uint64_t>();
  const auto affect = game::parse_affect(j.at("affect").get<std::string>());
  if (type == "choice") {
    const auto phase = parse_phase(j.at("phase").get<std::string>());
    if (phase == Phase::finished) throw DataError("choice in phase finished");
    game::ChoiceEvent e{round_index,
                        game::round_from_json(j),
                        j.at("chosen").get<std::size_t>(),
                        j.at("defended").get<bool>(),
                        j.at("payoff").get<double>(),
                        affect,
                        ts};
    e.validate();
    if ((phase == Phase::practice) != (affect == game::Affect::none))
      throw DataError("practice choices must have affect none and main choices an affect");
    return {seq, ChoiceRecord{phase, std::move(e)}};
  }
  if (type == "utterance") {
    if (affect == game::Affect::none) throw DataError("utterance without affect");
    return {seq, UtteranceRecord{round_index, affect, j.at("text").get<std::string>(), ts}};
  }
  throw DataError("unknown event type '" + type + "'");
}

}  // namespace

LogRecord parse_record(std::string_view line, std::size_t line_number) {
  try {
    return parse_json_record(json::parse(line));
  } catch (const json::exception& e) {
    throw ParseError(line_number, e.what());
  } catch (const std::exception& e) {
    throw ParseError(line_number, e.what());
  }
}

std::vector<LogRecord> read_event_log(std::istream& in) {
  std::vector<LogRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto record = parse_record(line, line_number);
    if (record.seq != records.size() + 1)
      throw ParseError(line_number, "expected seq " + std::to_string(records.size() + 1) + ", got " +
                                        std::to_string(record.seq));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw DataError("empty event log");
  return records;
}

std::vector<LogRecord> read_event_log_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open event log " + path.string());
  try {
    return read_event_log(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.message());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<game::ChoiceEvent> choice_events(std::span<const LogRecord> records, std::optional<Phase> phase) {
  std::vector<game::ChoiceEvent> out;
  for (const auto& r : records)
    if (r.is_choice() && (!phase || r.choice().phase == *phase)) out.push_back(r.choice().event);
  return out;
}

void write_choice_log(std::ostream& out, std::span<const game::ChoiceEvent> events, Phase phase) {
  std::uint64_t seq = 0;
  for (const auto& e : events) out << format_record({++seq, ChoiceRecord{phase, e}}) << '\n';
}

}  // namespace affectgate::session
