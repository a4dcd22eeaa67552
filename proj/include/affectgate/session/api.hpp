#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "affectgate/session/manager.hpp"

namespace affectgate::session {

struct HttpRequest {
  std::string method;
  std::string target;  // path with optional query string
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Transport-independent handler for the session API:
//   POST /sessions                         config -> {"id", ...summary}
//   GET  /sessions                         {"sessions": [id, ...]}
//   GET  /sessions/{id}                    summary
//   GET  /sessions/{id}/round              current board
//   POST /sessions/{id}/choice             {"round", "gate"} -> outcome
//   GET  /sessions/{id}/rationality?phase= cumulative fit (practice|main)
//   GET  /sessions/{id}/log                application/x-ndjson
// Errors are {"error": message} with 400, 404, 405 or 409.
class ApiRouter {
 public:
  explicit ApiRouter(SessionManager& manager) : manager_(manager) {}

  HttpResponse handle(const HttpRequest& request) const;

  // The session id if `target` is a feed path /sessions/{id}/feed.
  static std::optional<std::string> feed_session(std::string_view target);

 private:
  SessionManager& manager_;
};

// Path and decoded query parameters of a request target.
struct Target {
  std::string path;
  std::map<std::string, std::string> query;
};
Target parse_target(std::string_view target);

}  // namespace affectgate::session
