#include "affectgate/session/session.hpp"

#include <numeric>

#include "affectgate/core/error.hpp"
#include "affectgate/game/rounds_io.hpp"
#include "affectgate/rationality/dataset.hpp"
#include "affectgate/rationality/io.hpp"
#include "affectgate/rationality/lambda_fit.hpp"

namespace affectgate::session {

using nlohmann::json;

namespace {

constexpr std::uint64_t kBoardStreamPractice = 1;
constexpr std::uint64_t kBoardStreamMain = 2;
constexpr std::uint64_t kOutcomeStream = 3;
constexpr std::uint64_t kUtteranceStream = 4;

void append_boards(std::vector<game::RoundSpec>& out, const std::vector<game::RoundSpec>& rounds,
                   std::size_t count, Rng rng) {
  std::vector<std::size_t> order(rounds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));
  for (std::size_t i = 0; i < count; ++i) out.push_back(rounds[order[i % order.size()]]);
}

std::vector<game::RoundSpec> session_boards(const SessionConfig& config,
                                            const std::vector<game::RoundSpec>& rounds) {
  if (rounds.empty()) throw DataError("session needs at least one round");
  std::vector<game::RoundSpec> boards;
  boards.reserve(config.practice_round_count + config.main_round_count);
  append_boards(boards, rounds, config.practice_round_count, Rng::stream(config.seed, kBoardStreamPractice));
  append_boards(boards, rounds, config.main_round_count, Rng::stream(config.seed, kBoardStreamMain));
  return boards;
}

std::vector<std::string> checked_pool(std::vector<std::string> pool) {
  if (pool.empty()) throw DataError("empty utterance pool");
  return pool;
}

}  // namespace

void SessionConfig::validate() const {
  if (affect_condition == game::Affect::none) throw DataError("affect_condition must be negative or positive");
  if (practice_round_count < 1) throw DataError("practice_round_count must be >= 1");
  if (main_round_count < 1) throw DataError("main_round_count must be >= 1");
  if (utterance_every < 1) throw DataError("utterance_every must be >= 1");
  if (rounds_source.empty()) throw DataError("rounds_source must be set");
}

json config_to_json(const SessionConfig& c) {
  return {{"affect_condition", game::to_string(c.affect_condition)},
          {"practice_round_count", c.practice_round_count},
          {"main_round_count", c.main_round_count},
          {"rounds_source", c.rounds_source},
          {"seed", c.seed},
          {"show_coverage", c.show_coverage},
          {"utterance_every", c.utterance_every},
          {"notes", c.notes}};
}

SessionConfig config_from_json(const json& j, std::uint64_t fallback_seed) {
  if (!j.is_object()) throw DataError("session config must be a JSON object");
  SessionConfig c;
  c.seed = fallback_seed;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "affect_condition") {
        c.affect_condition = game::parse_affect(value.get<std::string>());
      } else if (key == "practice_round_count") {
        c.practice_round_count = value.get<std::size_t>();
      } else if (key == "main_round_count") {
        c.main_round_count = value.get<std::size_t>();
      } else if (key == "rounds_source") {
        c.rounds_source = value.get<std::string>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "show_coverage") {
        c.show_coverage = value.get<bool>();
      } else if (key == "utterance_every") {
        c.utterance_every = value.get<std::size_t>();
      } else if (key == "notes") {
        c.notes = value.get<std::string>();
      } else {
        throw DataError("unknown config field '" + key + "'");
      }
      if ((key.ends_with("_count") || key == "seed" || key == "utterance_every") &&
          !(value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0)))
        throw DataError(key + " must be a nonnegative integer");
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid session config: ") + e.what());
  }
  if (!j.contains("affect_condition")) throw DataError("affect_condition is required");
  c.validate();
  return c;
}

json outcome_to_json(const ChoiceOutcome& o) {
  json j{{"round_index", o.round_index}, {"phase", to_string(o.phase)},      {"gate", o.gate},
         {"defended", o.defended},       {"payoff", o.payoff},               {"next_phase", to_string(o.next_phase)},
         {"next_round", o.next_round},   {"replayed", o.replayed}};
  j["utterance"] = o.utterance ? json(*o.utterance) : json(nullptr);
  return j;
}

json round_view_to_json(const RoundView& v, bool include_coverage) {
  json j{{"round_index", v.round_index},
         {"phase", to_string(v.phase)},
         {"phase_round", v.phase_round},
         {"phase_round_count", v.phase_round_count}};
  if (v.board) j["gates"] = game::round_to_json(*v.board, include_coverage).at("gates");
  return j;
}

json rationality_report(std::span<const game::ChoiceEvent> events, Phase phase) {
  if (events.empty()) throw SessionConflict("no " + std::string(to_string(phase)) + " choices yet");
  const rationality::ChoiceDataset data({events.begin(), events.end()});
  const auto fit = rationality::estimate_lambda(data);
  const auto series = rationality::cumulative_lambda(data);
  auto j = rationality::fit_report_json(fit, series);
  j["phase"] = to_string(phase);
  j["events"] = events.size();
  return j;
}

Session::Session(std::string id, SessionConfig config, std::vector<game::RoundSpec> rounds,
                 std::vector<std::string> utterances, Clock clock, LogSink sink)
    : id_(std::move(id)),
      config_((config.validate(), std::move(config))),
      boards_(session_boards(config_, rounds)),
      clock_(clock ? std::move(clock) : Clock(now_utc)),
      sink_(std::move(sink)),
      outcome_rng_(Rng::stream(config_.seed, kOutcomeStream)),
      cycler_(checked_pool(std::move(utterances)), Rng::stream(config_.seed, kUtteranceStream).next()) {}

std::unique_ptr<Session> Session::restore(std::string id, SessionConfig config,
                                          std::vector<game::RoundSpec> rounds,
                                          std::vector<std::string> utterances,
                                          std::span<const LogRecord> records, Clock clock, LogSink sink) {
  auto s = std::make_unique<Session>(std::move(id), std::move(config), std::move(rounds), std::move(utterances),
                                     std::move(clock), std::move(sink));
  const auto fail = [&](const LogRecord& r, const std::string& what) {
    throw DataError("session " + s->id_ + ": seq " + std::to_string(r.seq) + ": " + what);
  };
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.seq != s->records_.size() + 1) fail(r, "sequence gap");
    if (!r.is_choice()) fail(r, "unexpected utterance");
    const auto& [phase, e] = r.choice();
    if (s->current_ >= s->boards_.size()) fail(r, "choice after the session finished");
    if (e.round_index != s->current_) fail(r, "expected round " + std::to_string(s->current_));
    if (phase != s->phase_of(s->current_)) fail(r, "phase does not match the round");
    if (e.round != s->boards_[s->current_]) fail(r, "board does not match the session's round order");

    const auto round = s->current_;
    const auto board = s->boards_[round];
    const auto outcome = game::resolve_choice(board, e.chosen_gate, s->outcome_rng_);
    if (outcome.defended != e.defended) fail(r, "outcome does not match the session's defense draws");
    s->append(r, false);

    ChoiceOutcome o{round, phase, e.chosen_gate, e.defended, e.payoff, std::nullopt, phase, round, false};
    if (auto text = s->utterance_due(round)) {
      const auto has_logged = i + 1 < records.size();
      if (has_logged) {
        const auto& next = records[++i];
        if (next.seq != s->records_.size() + 1 || next.is_choice() || next.utterance().text != *text || next.utterance().round_index != round ||
            next.utterance().affect != s->config_.affect_condition)
          fail(next, "utterance does not match the session's utterance order");
        s->append(next, false);
      } else {
        s->append({s->records_.size() + 1, UtteranceRecord{round, s->config_.affect_condition, *text, s->clock_()}},
                  true);
      }
      o.utterance = std::move(text);
    }
    s->current_ = round + 1;
    o.next_phase = s->phase_of(s->current_);
    o.next_round = s->current_;
    s->outcomes_.push_back(std::move(o));
  }
  return s;
}

Phase Session::phase_of(std::uint64_t round_index) const noexcept {
  if (round_index < config_.practice_round_count) return Phase::practice;
  if (round_index < boards_.size()) return Phase::main;
  return Phase::finished;
}

Phase Session::phase() const {
  std::lock_guard lock(mutex_);
  return phase_of(current_);
}

RoundView Session::current_round() const {
  std::lock_guard lock(mutex_);
  RoundView v;
  v.round_index = current_;
  v.phase = phase_of(current_);
  switch (v.phase) {
    case Phase::practice:
      v.phase_round = current_;
      v.phase_round_count = config_.practice_round_count;
      break;
    case Phase::main:
      v.phase_round = current_ - config_.practice_round_count;
      v.phase_round_count = config_.main_round_count;
      break;
    case Phase::finished:
      break;
  }
  if (v.phase != Phase::finished) v.board = boards_[current_];
  return v;
}

void Session::append(LogRecord record, bool persist) {
  auto line = format_record(record);
  if (persist && sink_) sink_(line);
  const auto message = json::parse(line);
  lines_.push_back(std::move(line));
  records_.push_back(std::move(record));
  notify(message);
}

void Session::notify(const json& message) {
  std::erase_if(listeners_, [&](auto& entry) { return !entry.second(message); });
}

std::optional<std::string> Session::utterance_due(std::uint64_t round_index) {
  if (phase_of(round_index) != Phase::main) return std::nullopt;
  if ((round_index - config_.practice_round_count + 1) % config_.utterance_every != 0) return std::nullopt;
  return cycler_.next();
}

ChoiceOutcome Session::play(std::size_t gate, Timestamp ts, bool persist) {
  const auto round = current_;
  const auto& board = boards_[round];
  if (gate >= board.size())
    throw std::out_of_range("gate " + std::to_string(gate) + " out of range for " + std::to_string(board.size()) +
                            " gates");
  const auto phase = phase_of(round);
  const auto outcome = game::resolve_choice(board, gate, outcome_rng_);
  const auto affect = phase == Phase::main ? config_.affect_condition : game::Affect::none;
  append({records_.size() + 1, ChoiceRecord{phase, {round, board, gate, outcome.defended, outcome.payoff, affect, ts}}},
         persist);

  ChoiceOutcome o{round, phase, gate, outcome.defended, outcome.payoff, std::nullopt, phase, round, false};
  if (auto text = utterance_due(round)) {
    append({records_.size() + 1, UtteranceRecord{round, config_.affect_condition, *text, ts}}, persist);
    o.utterance = std::move(text);
  }
  current_ = round + 1;
  o.next_phase = phase_of(current_);
  o.next_round = current_;
  outcomes_.push_back(o);
  return o;
}

ChoiceOutcome Session::submit_choice(std::uint64_t round_index, std::size_t gate) {
  std::lock_guard lock(mutex_);
  if (round_index < current_) {
    auto o = outcomes_[round_index];
    o.replayed = true;
    return o;
  }
  if (current_ >= boards_.size()) throw SessionConflict("session is finished");
  if (round_index > current_)
    throw SessionConflict("round " + std::to_string(round_index) + " is not the current round " +
                          std::to_string(current_));
  return play(gate, clock_(), true);
}

std::vector<LogRecord> Session::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::vector<game::ChoiceEvent> Session::choices(Phase phase) const {
  std::lock_guard lock(mutex_);
  return choice_events(records_, phase);
}

std::string Session::export_log() const {
  std::lock_guard lock(mutex_);
  std::string out;
  for (const auto& line : lines_) {
    out += line;
    out += '\n';
  }
  return out;
}

std::size_t Session::event_count() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

json Session::rationality(Phase phase) const {
  if (phase == Phase::finished) throw std::invalid_argument("rationality is reported per practice or main phase");
  const auto events = choices(phase);
  return rationality_report(events, phase);
}

json Session::summary() const {
  std::lock_guard lock(mutex_);
  return {{"id", id_},
          {"phase", to_string(phase_of(current_))},
          {"round_index", current_},
          {"total_rounds", boards_.size()},
          {"events", records_.size()},
          {"config", config_to_json(config_)}};
}

std::uint64_t Session::subscribe(Listener listener) {
  std::lock_guard lock(mutex_);
  const auto token = next_token_++;
  listeners_.emplace(token, std::move(listener));
  return token;
}

void Session::unsubscribe(std::uint64_t token) {
  std::lock_guard lock(mutex_);
  listeners_.erase(token);
}

void Session::publish(const json& message) {
  std::lock_guard lock(mutex_);
  notify(message);
}

}  // namespace affectgate::session
