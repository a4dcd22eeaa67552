#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "affectgate/core/random.hpp"
#include "affectgate/core/time.hpp"
#include "affectgate/game/gate.hpp"
#include "affectgate/nlg/utterance.hpp"
#include "affectgate/session/event_log.hpp"

namespace affectgate::session {

// The request is valid but does not fit the session's state: wrong phase,
// a round other than the current one, or nothing to fit yet.
class SessionConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionConfig {
  game::Affect affect_condition = game::Affect::positive;
  std::size_t practice_round_count = 8;
  std::size_t main_round_count = 35;
  std::string rounds_source = "default_35.ndjson";
  std::uint64_t seed = 0;
  bool show_coverage = true;
  // One utterance after every k-th main-phase choice.
  std::size_t utterance_every = 1;
  std::string notes;

  // Throws DataError.
  void validate() const;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

nlohmann::json config_to_json(const SessionConfig& config);
// Missing fields take their defaults; a missing seed becomes `fallback_seed`.
// Throws DataError.
SessionConfig config_from_json(const nlohmann::json& j, std::uint64_t fallback_seed);

struct ChoiceOutcome {
  std::uint64_t round_index = 0;
  Phase phase = Phase::practice;
  std::size_t gate = 0;
  bool defended = false;
  double payoff = 0.0;
  std::optional<std::string> utterance;
  Phase next_phase = Phase::practice;
  std::uint64_t next_round = 0;
  // Set when the round had already been played and the stored outcome is
  // returned again.
  bool replayed = false;
};

nlohmann::json outcome_to_json(const ChoiceOutcome& outcome);

struct RoundView {
  std::uint64_t round_index = 0;
  Phase phase = Phase::practice;
  // Position within the phase and the phase length.
  std::size_t phase_round = 0;
  std::size_t phase_round_count = 0;
  std::optional<game::RoundSpec> board;  // absent once finished
};

nlohmann::json round_view_to_json(const RoundView& view, bool include_coverage);

// Cumulative fit over one phase's choices, as served to clients:
// the rationality fit report plus "phase" and "events".
nlohmann::json rationality_report(std::span<const game::ChoiceEvent> events, Phase phase);

using Clock = std::function<Timestamp()>;
// Receives each appended log line; used to persist the log.
using LogSink = std::function<void(const std::string& line)>;
// Receives feed messages: log records and fit updates. Returning false
// unsubscribes the listener.
using Listener = std::function<bool(const nlohmann::json& message)>;

// One participant's run: practice rounds with affect none, then main rounds
// in the configured affect condition, each main choice optionally followed
// by an utterance. All mutations are serialized by an internal mutex.
//
// The board order, defense draws and utterance order come from separate
// streams of the config seed, so utterances do not depend on the player's
// choices or outcomes.
class Session {
 public:
  // Throws DataError for an invalid config, no rounds or an empty pool.
  Session(std::string id, SessionConfig config, std::vector<game::RoundSpec> rounds,
          std::vector<std::string> utterances, Clock clock = now_utc, LogSink sink = nullptr);

  // Rebuilds a session by folding over a persisted log. A missing trailing
  // utterance (interrupted write) is regenerated and sent to `sink`.
  // Throws DataError if the log disagrees with the session's own replay.
  static std::unique_ptr<Session> restore(std::string id, SessionConfig config,
                                          std::vector<game::RoundSpec> rounds,
                                          std::vector<std::string> utterances,
                                          std::span<const LogRecord> records, Clock clock = now_utc,
                                          LogSink sink = nullptr);

  const std::string& id() const noexcept { return id_; }
  const SessionConfig& config() const noexcept { return config_; }
  std::size_t total_rounds() const noexcept { return boards_.size(); }

  Phase phase() const;
  RoundView current_round() const;

  // Plays gate `gate` in round `round_index`. Resubmitting an already played
  // round returns the stored outcome without new events. Throws
  // SessionConflict for a future round or a finished session and
  // std::out_of_range for a gate outside the board.
  ChoiceOutcome submit_choice(std::uint64_t round_index, std::size_t gate);

  // Consistent snapshots of the log.
  std::vector<LogRecord> records() const;
  std::vector<game::ChoiceEvent> choices(Phase phase) const;
  // The log as line-delimited JSON, byte-identical to what was persisted.
  std::string export_log() const;
  std::size_t event_count() const;

  // Throws SessionConflict if the phase has no choices yet.
  nlohmann::json rationality(Phase phase) const;

  nlohmann::json summary() const;

  // Listeners are called with the session lock held, in log order; they must
  // not call back into the session.
  std::uint64_t subscribe(Listener listener);
  void unsubscribe(std::uint64_t token);
  void publish(const nlohmann::json& message);

 private:
  void notify(const nlohmann::json& message);
  Phase phase_of(std::uint64_t round_index) const noexcept;
  void append(LogRecord record, bool persist);
  ChoiceOutcome play(std::size_t gate, Timestamp ts, bool persist);
  std::optional<std::string> utterance_due(std::uint64_t round_index);

  std::string id_;
  SessionConfig config_;
  std::vector<game::RoundSpec> boards_;
  Clock clock_;
  LogSink sink_;

  mutable std::mutex mutex_;
  std::uint64_t current_ = 0;
  Rng outcome_rng_;
  nlg::UtteranceCycler cycler_;
  std::vector<LogRecord> records_;
  std::vector<std::string> lines_;
  std::vector<ChoiceOutcome> outcomes_;
  std::map<std::uint64_t, Listener> listeners_;
  std::uint64_t next_token_ = 1;
};

}  // namespace affectgate::session
