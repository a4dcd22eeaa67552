#include "affectgate/session/manager.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "affectgate/core/error.hpp"
#include "affectgate/game/rounds_io.hpp"

namespace affectgate::session {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool plain_file_name(const std::string& name) {
  if (name.empty() || name.front() == '.') return false;
  for (unsigned char c : name)
    if (!std::isalnum(c) && c != '_' && c != '-' && c != '.') return false;
  return true;
}

// Appends each line to the file and flushes it before returning.
class LineAppender {
 public:
  explicit LineAppender(const fs::path& path) : out_(std::make_shared<std::ofstream>(path, std::ios::app)) {
    if (!*out_) throw DataError("cannot open " + path.string() + " for writing");
  }
  void operator()(const std::string& line) const {
    *out_ << line << '\n';
    out_->flush();
    if (!*out_) throw std::runtime_error("event log write failed");
  }

 private:
  std::shared_ptr<std::ofstream> out_;
};

}  // namespace

SessionManager::SessionManager(ManagerOptions options)
    : options_(std::move(options)), id_rng_(std::random_device{}()) {
  if (!options_.clock) options_.clock = now_utc;
  if (options_.log_dir) fs::create_directories(*options_.log_dir);
  if (options_.background_fits) fit_worker_ = std::jthread([this](std::stop_token st) { fit_loop(st); });
}

SessionManager::~SessionManager() {
  if (fit_worker_.joinable()) {
    fit_worker_.request_stop();
    fit_cv_.notify_all();
  }
}

std::shared_ptr<const std::vector<game::RoundSpec>> SessionManager::rounds(const std::string& name) {
  if (!plain_file_name(name)) throw DataError("invalid rounds_source '" + name + "'");
  std::lock_guard lock(rounds_mutex_);
  if (auto it = rounds_.find(name); it != rounds_.end()) return it->second;
  const auto path = options_.rounds_dir / name;
  if (!fs::is_regular_file(path)) throw DataError("unknown rounds_source '" + name + "'");
  auto loaded = std::make_shared<const std::vector<game::RoundSpec>>(game::load_rounds_file(path));
  rounds_.emplace(name, loaded);
  return loaded;
}

std::vector<std::string> SessionManager::pool_for(game::Affect affect) const {
  const auto it = options_.utterances.find(affect);
  if (it == options_.utterances.end() || it->second.empty())
    throw DataError("no utterances for affect " + std::string(game::to_string(affect)));
  return it->second;
}

LogSink SessionManager::sink_for(const std::string& id) const {
  if (!options_.log_dir) return nullptr;
  return LineAppender(*options_.log_dir / (id + ".ndjson"));
}

std::string SessionManager::new_id() {
  std::ostringstream s;
  s << 's' << std::hex << std::setw(12) << std::setfill('0') << (id_rng_() & 0xffffffffffffULL);
  return s.str();
}

std::shared_ptr<Session> SessionManager::create(const json& request) {
  std::uint64_t seed;
  {
    std::unique_lock lock(sessions_mutex_);
    seed = id_rng_();
  }
  return create(config_from_json(request, seed));
}

std::shared_ptr<Session> SessionManager::create(const SessionConfig& config) {
  config.validate();
  const auto boards = rounds(config.rounds_source);
  auto pool = pool_for(config.affect_condition);

  std::unique_lock lock(sessions_mutex_);
  std::string id;
  do {
    id = new_id();
  } while (sessions_.contains(id) || (options_.log_dir && fs::exists(*options_.log_dir / (id + ".config.json"))));
  if (options_.log_dir) {
    std::ofstream out(*options_.log_dir / (id + ".config.json"));
    out << config_to_json(config).dump(2) << '\n';
    if (!out) throw DataError("cannot write session config for " + id);
  }
  auto session = std::make_shared<Session>(id, config, *boards, std::move(pool), options_.clock, sink_for(id));
  sessions_.emplace(id, session);
  return session;
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::string> SessionManager::ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

ChoiceOutcome SessionManager::submit_choice(Session& session, std::uint64_t round_index, std::size_t gate) {
  auto outcome = session.submit_choice(round_index, gate);
  if (!outcome.replayed)
    if (auto shared = find(session.id())) schedule_fit(shared, outcome.phase);
  return outcome;
}

std::size_t SessionManager::recover() {
  if (!options_.log_dir) return 0;
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(*options_.log_dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(".config.json")) configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());

  std::size_t restored = 0;
  for (const auto& path : configs) {
    const auto name = path.filename().string();
    const auto id = name.substr(0, name.size() - std::string_view(".config.json").size());
    if (find(id)) continue;
    std::ifstream in(path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    const auto config = config_from_json(j, 0);
    const auto log_path = *options_.log_dir / (id + ".ndjson");
    std::vector<LogRecord> records;
    if (fs::exists(log_path) && fs::file_size(log_path) > 0) records = read_event_log_file(log_path);
    auto session = Session::restore(id, config, *rounds(config.rounds_source), pool_for(config.affect_condition),
                                    records, options_.clock, sink_for(id));
    std::unique_lock lock(sessions_mutex_);
    sessions_.emplace(id, std::shared_ptr<Session>(std::move(session)));
    ++restored;
  }
  return restored;
}

void SessionManager::schedule_fit(const std::shared_ptr<Session>& session, Phase phase) {
  if (!options_.background_fits) return;
  {
    std::lock_guard lock(fit_mutex_);
    // A queued job for the same session and phase already covers this choice.
    for (const auto& job : fit_queue_)
      if (job.phase == phase && job.session.lock() == session) return;
    fit_queue_.push_back({session, phase});
  }
  fit_cv_.notify_all();
}

void SessionManager::fit_loop(std::stop_token stop) {
  while (true) {
    FitJob job;
    {
      std::unique_lock lock(fit_mutex_);
      fit_cv_.wait(lock, stop, [&] { return !fit_queue_.empty(); });
      if (stop.stop_requested()) return;
      job = std::move(fit_queue_.front());
      fit_queue_.pop_front();
      fit_running_ = true;
    }
    if (auto session = job.session.lock()) {
      try {
        auto report = session->rationality(job.phase);
        report["type"] = "fit";
        session->publish(report);
      } catch (const std::exception&) {
        // Nothing to publish for this phase.
      }
    }
    {
      std::lock_guard lock(fit_mutex_);
      fit_running_ = false;
    }
    fit_cv_.notify_all();
  }
}

void SessionManager::wait_for_fits() {
  if (!options_.background_fits) return;
  std::unique_lock lock(fit_mutex_);
  fit_cv_.wait(lock, [&] { return fit_queue_.empty() && !fit_running_; });
}

}  // namespace affectgate::session
