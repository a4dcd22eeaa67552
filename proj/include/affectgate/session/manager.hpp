#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "affectgate/session/session.hpp"

namespace affectgate::session {

struct ManagerOptions {
  // Directory holding the rounds files that configs may name.
  std::filesystem::path rounds_dir;
  // Where `<id>.ndjson` and `<id>.config.json` are written. Unset keeps
  // sessions in memory only.
  std::optional<std::filesystem::path> log_dir;
  // Sentences per affect condition.
  std::map<game::Affect, std::vector<std::string>> utterances;
  Clock clock = now_utc;
  // Compute a fit after every choice and push it to feed listeners.
  bool background_fits = true;
};

// Owns the live sessions. Thread-safe.
class SessionManager {
 public:
  explicit SessionManager(ManagerOptions options);
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  // `request` is a config document (see config_from_json); a missing seed is
  // drawn at random. Throws DataError for an invalid config or rounds file.
  std::shared_ptr<Session> create(const nlohmann::json& request);
  std::shared_ptr<Session> create(const SessionConfig& config);

  // nullptr if unknown.
  std::shared_ptr<Session> find(const std::string& id) const;
  std::vector<std::string> ids() const;

  // Plays a choice and schedules a fit of the choice's phase.
  ChoiceOutcome submit_choice(Session& session, std::uint64_t round_index, std::size_t gate);

  // Loads every session persisted in the log directory. Returns the number
  // restored. Throws DataError if a log cannot be replayed.
  std::size_t recover();

  // Blocks until no background fit is queued or running.
  void wait_for_fits();

  // Rounds file by name, resolved inside rounds_dir. Names are plain file
  // names; anything with a path component is rejected with DataError.
  std::shared_ptr<const std::vector<game::RoundSpec>> rounds(const std::string& name);

 private:
  struct FitJob {
    std::weak_ptr<Session> session;
    Phase phase;
  };

  std::vector<std::string> pool_for(game::Affect affect) const;
  LogSink sink_for(const std::string& id) const;
  std::string new_id();
  void schedule_fit(const std::shared_ptr<Session>& session, Phase phase);
  void fit_loop(std::stop_token stop);

  ManagerOptions options_;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 id_rng_;

  std::mutex rounds_mutex_;
  std::map<std::string, std::shared_ptr<const std::vector<game::RoundSpec>>> rounds_;

  std::mutex fit_mutex_;
  std::condition_variable_any fit_cv_;
  std::deque<FitJob> fit_queue_;
  bool fit_running_ = false;
  std::jthread fit_worker_;
};

}  // namespace affectgate::session
