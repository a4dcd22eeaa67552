#include "affectgate/session/api.hpp"

#include <vector>

#include "affectgate/core/error.hpp"

namespace affectgate::session {

using nlohmann::json;

namespace {

HttpResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

HttpResponse error(int status, const std::string& message) { return json_response(status, {{"error", message}}); }

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    const auto slash = path.find('/');
    const auto part = path.substr(0, slash);
    if (!part.empty()) parts.push_back(part);
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return parts;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

HttpResponse choice(SessionManager& manager, Session& session, const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    return error(400, "request body is not JSON");
  }
  const auto index = [&](const char* key) {
    return j.contains(key) && j[key].is_number_integer() && (j[key].is_number_unsigned() || j[key].get<std::int64_t>() >= 0);
  };
  if (!j.is_object() || !index("round") || !index("gate"))
    return error(400, "expected {\"round\": nonnegative integer, \"gate\": nonnegative integer}");
  try {
    const auto outcome = manager.submit_choice(session, j["round"].get<std::uint64_t>(), j["gate"].get<std::size_t>());
    return json_response(200, outcome_to_json(outcome));
  } catch (const std::out_of_range& e) {
    return error(400, e.what());
  }
}

HttpResponse rationality(const Session& session, const std::map<std::string, std::string>& query) {
  const auto it = query.find("phase");
  const std::string name = it == query.end() ? "main" : it->second;
  Phase phase;
  try {
    phase = parse_phase(name);
  } catch (const DataError& e) {
    return error(400, e.what());
  }
  if (phase == Phase::finished) return error(400, "phase must be practice or main");
  return json_response(200, session.rationality(phase));
}

}  // namespace

Target parse_target(std::string_view target) {
  Target t;
  const auto q = target.find('?');
  t.path = percent_decode(target.substr(0, q));
  if (q == std::string_view::npos) return t;
  auto query = target.substr(q + 1);
  while (!query.empty()) {
    const auto amp = query.find('&');
    const auto pair = query.substr(0, amp);
    const auto eq = pair.find('=');
    if (!pair.empty())
      t.query[percent_decode(pair.substr(0, eq))] =
          eq == std::string_view::npos ? std::string() : percent_decode(pair.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return t;
}

std::optional<std::string> ApiRouter::feed_session(std::string_view target) {
  const auto parsed = parse_target(target);
  const auto parts = split_path(parsed.path);
  if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "feed") return std::string(parts[1]);
  return std::nullopt;
}

HttpResponse ApiRouter::handle(const HttpRequest& request) const {
  const auto target = parse_target(request.target);
  const auto parts = split_path(target.path);
  const auto& method = request.method;
  const auto allow = [&](std::string_view m) { return method == m; };

  try {
    if (parts.empty() || parts[0] != "sessions") return error(404, "not found");

    if (parts.size() == 1) {
      if (allow("GET")) return json_response(200, {{"sessions", manager_.ids()}});
      if (!allow("POST")) return error(405, "method not allowed");
      json config;
      try {
        config = request.body.empty() ? json::object() : json::parse(request.body);
      } catch (const json::exception&) {
        return error(400, "request body is not JSON");
      }
      try {
        const auto session = manager_.create(config);
        return json_response(201, session->summary());
      } catch (const DataError& e) {
        return error(400, e.what());
      }
    }

    const auto session = manager_.find(std::string(parts[1]));
    if (!session) return error(404, "unknown session " + std::string(parts[1]));

    if (parts.size() == 2) {
      if (!allow("GET")) return error(405, "method not allowed");
      return json_response(200, session->summary());
    }
    if (parts.size() != 3) return error(404, "not found");

    const auto leaf = parts[2];
    if (leaf == "round") {
      if (!allow("GET")) return error(405, "method not allowed");
      return json_response(200, round_view_to_json(session->current_round(), session->config().show_coverage));
    }
    if (leaf == "choice") {
      if (!allow("POST")) return error(405, "method not allowed");
      return choice(manager_, *session, request.body);
    }
    if (leaf == "rationality") {
      if (!allow("GET")) return error(405, "method not allowed");
      return rationality(*session, target.query);
    }
    if (leaf == "log") {
      if (!allow("GET")) return error(405, "method not allowed");
      return {200, "application/x-ndjson", session->export_log()};
    }
    if (leaf == "feed") return error(400, "the feed requires a WebSocket upgrade");
    return error(404, "not found");
  } catch (const SessionConflict& e) {
    return error(409, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

}  // namespace affectgate::session
