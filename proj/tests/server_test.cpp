#include <doctest.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <json.hpp>

#include "affectgate/rationality/dataset.hpp"
#include "affectgate/rationality/lambda_fit.hpp"
#include "affectgate/session/server.hpp"

using namespace affectgate;
using namespace affectgate::session;
using nlohmann::json;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

const std::filesystem::path kData = AFFECTGATE_DATA_DIR;

ManagerOptions options() {
  ManagerOptions o;
  o.rounds_dir = kData / "rounds";
  o.utterances = {{game::Affect::positive, {"Nice work.", "Great move.", "You are doing well."}},
                  {game::Affect::negative, {"Bad luck.", "Poor choice."}}};
  return o;
}

// Blocking keep-alive HTTP client.
class Client {
 public:
  explicit Client(std::uint16_t port) : stream_(ioc_) { stream_.connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port)); }

  http::response<http::string_body> request(http::verb method, const std::string& target, const std::string& body = "") {
    http::request<http::string_body> req{method, target, 11};
    req.set(http::field::host, "localhost");
    req.keep_alive(true);
    if (!body.empty()) {
      req.set(http::field::content_type, "application/json");
      req.body() = body;
    }
    req.prepare_payload();
    http::write(stream_, req);
    http::response<http::string_body> res;
    http::read(stream_, buffer_, res);
    return res;
  }

  json get(const std::string& target) { return json::parse(request(http::verb::get, target).body()); }
  json post(const std::string& target, const json& body) {
    return json::parse(request(http::verb::post, target, body.dump()).body());
  }

 private:
  net::io_context ioc_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
};

class Feed {
 public:
  Feed(std::uint16_t port, const std::string& target) : ws_(ioc_) {
    net::connect(ws_.next_layer(), std::vector{tcp::endpoint(net::ip::make_address("127.0.0.1"), port)});
    ws_.handshake("localhost", target);
  }
  json next() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  }

 private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

}  // namespace

TEST_CASE("full session over HTTP with a live feed") {
  SessionManager manager(options());
  Server server(manager, {.address = "127.0.0.1", .port = 0, .io_threads = 1, .worker_threads = 2, .log = nullptr});
  server.start();
  REQUIRE(server.port() != 0);

  Client client(server.port());
  const auto created = client.request(http::verb::post, "/sessions", R"({"affect_condition": "positive", "seed": 21})");
  REQUIRE(created.result_int() == 201);
  CHECK(created[http::field::access_control_allow_origin] == "*");
  const auto id = json::parse(created.body()).at("id").get<std::string>();

  Feed feed(server.port(), "/sessions/" + id + "/feed");

  std::size_t utterances = 0;
  for (std::uint64_t r = 0; r < 43; ++r) {
    const auto round = client.get("/sessions/" + id + "/round");
    REQUIRE(round.at("round_index") == r);
    CHECK(round.at("phase") == (r < 8 ? "practice" : "main"));
    const auto outcome = client.post("/sessions/" + id + "/choice", {{"round", r}, {"gate", (r * 5) % 8}});
    CHECK(outcome.at("round_index") == r);
    if (!outcome.at("utterance").is_null()) ++utterances;
  }
  CHECK(utterances == 35);
  CHECK(client.get("/sessions/" + id + "/round").at("phase") == "finished");

  const auto log = client.request(http::verb::get, "/sessions/" + id + "/log");
  CHECK(log[http::field::content_type] == "application/x-ndjson");
  std::vector<json> lines;
  std::istringstream in(log.body());
  for (std::string line; std::getline(in, line);) lines.push_back(json::parse(line));
  CHECK(lines.size() == 43 + 35);

  // Feed messages: the log records in order, interleaved with fit updates.
  std::size_t matched = 0;
  json last_fit;
  while (matched < lines.size() || last_fit.is_null() || last_fit.at("events") != 35 || last_fit.at("phase") != "main") {
    const auto message = feed.next();
    if (message.at("type") == "fit") {
      last_fit = message;
      continue;
    }
    REQUIRE(matched < lines.size());
    CHECK(message == lines[matched]);
    ++matched;
  }

  const auto served = client.get("/sessions/" + id + "/rationality?phase=main");
  const auto session = manager.find(id);
  const rationality::ChoiceDataset offline(session->choices(Phase::main));
  const auto fit = rationality::estimate_lambda(offline);
  CHECK(served.at("lambda_hat").get<double>() == fit.lambda_hat);
  CHECK(last_fit.at("lambda_hat").get<double>() == fit.lambda_hat);
  CHECK(served.at("series").size() == 35);
  CHECK(client.get("/sessions/" + id + "/rationality?phase=practice").at("series").size() == 8);

  const auto preflight = client.request(http::verb::options, "/sessions/" + id + "/choice");
  CHECK(preflight.result_int() == 204);
  CHECK(client.request(http::verb::get, "/sessions/unknown/round").result_int() == 404);

  server.stop();
}

TEST_CASE("feed for an unknown session is refused") {
  SessionManager manager(options());
  Server server(manager, {.address = "127.0.0.1", .port = 0, .io_threads = 1, .worker_threads = 1, .log = nullptr});
  server.start();
  CHECK_THROWS(Feed(server.port(), "/sessions/missing/feed"));
}

TEST_CASE("binding a busy port fails") {
  SessionManager manager(options());
  Server first(manager, {.address = "127.0.0.1", .port = 0, .io_threads = 1, .worker_threads = 1, .log = nullptr});
  first.start();
  Server second(manager, {.address = "127.0.0.1", .port = first.port(), .io_threads = 1, .worker_threads = 1, .log = nullptr});
  CHECK_THROWS_AS(second.start(), std::system_error);
}
