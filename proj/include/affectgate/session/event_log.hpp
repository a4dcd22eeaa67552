#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "affectgate/game/choice.hpp"

namespace affectgate::session {

enum class Phase { practice, main, finished };

std::string_view to_string(Phase phase) noexcept;
// Throws DataError.
Phase parse_phase(std::string_view text);

struct ChoiceRecord {
  Phase phase = Phase::practice;
  game::ChoiceEvent event;

  friend bool operator==(const ChoiceRecord&, const ChoiceRecord&) = default;
};

struct UtteranceRecord {
  std::uint64_t round_index = 0;
  game::Affect affect = game::Affect::positive;
  std::string text;
  Timestamp timestamp{};

  friend bool operator==(const UtteranceRecord&, const UtteranceRecord&) = default;
};

// One line of a session event log. Sequence numbers start at 1.
struct LogRecord {
  std::uint64_t seq = 0;
  std::variant<ChoiceRecord, UtteranceRecord> body;

  bool is_choice() const noexcept { return std::holds_alternative<ChoiceRecord>(body); }
  const ChoiceRecord& choice() const { return std::get<ChoiceRecord>(body); }
  const UtteranceRecord& utterance() const { return std::get<UtteranceRecord>(body); }

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

// Line schemas:
//   {"seq","type":"choice","ts","round_index","phase","gates":[...],
//    "chosen","defended","payoff","affect"}
//   {"seq","type":"utterance","ts","round_index","affect","text"}
nlohmann::ordered_json record_to_json(const LogRecord& record);
// Compact JSON without the trailing newline.
std::string format_record(const LogRecord& record);

// Throws ParseError naming `line_number`.
LogRecord parse_record(std::string_view line, std::size_t line_number);

// Reads a whole log. Blank lines are skipped; sequence numbers must be
// gapless from 1. Throws ParseError, or DataError for an empty log.
std::vector<LogRecord> read_event_log(std::istream& in);
std::vector<LogRecord> read_event_log_file(const std::filesystem::path& path);

// Choice events in log order, optionally restricted to one phase.
std::vector<game::ChoiceEvent> choice_events(std::span<const LogRecord> records,
                                             std::optional<Phase> phase = std::nullopt);

// Writes `events` as a log of choice records numbered from 1.
void write_choice_log(std::ostream& out, std::span<const game::ChoiceEvent> events, Phase phase);

}  // namespace affectgate::session
