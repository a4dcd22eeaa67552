#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "affectgate/session/manager.hpp"
#include "affectgate/session/server.hpp"

namespace affectgate::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

// Runs the command line: train, generate, simulate, fit, make-rounds, serve.
// Output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct ServeOptions {
  std::filesystem::path data_dir = "data";
  std::optional<std::filesystem::path> bundle;
  // Precomputed pools from `generate`; used instead of the bundle when both
  // are given.
  std::optional<std::filesystem::path> positive_pool;
  std::optional<std::filesystem::path> negative_pool;
  std::optional<std::filesystem::path> templates;
  std::optional<std::filesystem::path> lexicon;
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> blocklist;
  std::optional<std::filesystem::path> rounds_dir;
  std::optional<std::filesystem::path> log_dir;
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;
  unsigned threads = 2;
};

struct Service {
  std::unique_ptr<session::SessionManager> manager;
  std::unique_ptr<session::Server> server;
};

// Loads the models or pools, recovers persisted sessions and starts the
// server. Throws DataError naming any missing input.
Service start_service(const ServeOptions& options, std::ostream& log);

}  // namespace affectgate::cli
