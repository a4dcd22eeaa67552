#include "affectgate/session/server.hpp"

#include <atomic>
#include <deque>
#include <optional>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "affectgate/session/api.hpp"

namespace affectgate::session {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct Server::Impl {
  Impl(SessionManager& m, ServerOptions o) : manager(m), router(m), options(std::move(o)) {}

  void log(const std::string& line) const {
    if (options.log) options.log(line);
  }

  SessionManager& manager;
  ApiRouter router;
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::optional<net::thread_pool> workers;
  std::vector<std::thread> threads;
  std::uint16_t bound_port = 0;
  bool running = false;
};

namespace {

using Request = http::request<http::string_body>;

class FeedSession : public std::enable_shared_from_this<FeedSession> {
 public:
  FeedSession(tcp::socket&& socket, std::shared_ptr<Session> session)
      : ws_(std::move(socket)), session_(std::move(session)) {}

  // Subscribes before the handshake so that nothing published after the
  // upgrade request is lost; messages are held until the handshake is done.
  void run(Request request) {
    request_ = std::move(request);
    std::weak_ptr<FeedSession> weak = shared_from_this();
    token_ = session_->subscribe([weak](const nlohmann::json& message) {
      auto self = weak.lock();
      if (!self) return false;
      net::post(self->ws_.get_executor(), [self, text = message.dump()]() mutable { self->enqueue(std::move(text)); });
      return true;
    });
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(request_, beast::bind_front_handler(&FeedSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) {
      session_->unsubscribe(token_);
      return;
    }
    accepted_ = true;
    if (!queue_.empty()) write();
    read();
  }

  void read() { ws_.async_read(buffer_, beast::bind_front_handler(&FeedSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      session_->unsubscribe(token_);
      return;
    }
    buffer_.consume(buffer_.size());
    read();
  }

  void enqueue(std::string text) {
    queue_.push_back(std::move(text));
    if (accepted_ && queue_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), beast::bind_front_handler(&FeedSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return;
    queue_.pop_front();
    if (!queue_.empty()) write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<Session> session_;
  Request request_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::uint64_t token_ = 0;
  bool accepted_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Server::Impl& impl) : stream_(std::move(socket)), impl_(impl) {}

  void run() { net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read, shared_from_this())); }

 private:
  void read() {
    request_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, request_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;

    if (websocket::is_upgrade(request_)) {
      const auto id = ApiRouter::feed_session(std::string_view(request_.target().data(), request_.target().size()));
      auto session = id ? impl_.manager.find(*id) : nullptr;
      if (!session) {
        respond({404, "application/json", R"({"error":"unknown feed"})"});
        return;
      }
      stream_.expires_never();
      std::make_shared<FeedSession>(stream_.release_socket(), std::move(session))->run(std::move(request_));
      return;
    }
    if (request_.method() == http::verb::options) {
      respond({204, "", ""});
      return;
    }

    HttpRequest request{std::string(request_.method_string()), std::string(request_.target()), request_.body()};
    net::post(*impl_.workers, [self = shared_from_this(), request = std::move(request)] {
      auto response = self->impl_.router.handle(request);
      net::post(self->stream_.get_executor(), [self, response = std::move(response)] { self->respond(response); });
    });
  }

  void respond(const HttpResponse& r) {
    auto res = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(r.status),
                                                                   request_.version());
    res->set(http::field::server, "affectgate");
    res->set(http::field::access_control_allow_origin, "*");
    res->set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
    res->set(http::field::access_control_allow_headers, "Content-Type");
    if (!r.content_type.empty()) res->set(http::field::content_type, r.content_type);
    res->keep_alive(request_.keep_alive());
    res->body() = r.body;
    res->prepare_payload();
    response_ = res;
    http::async_write(stream_, *res,
                      beast::bind_front_handler(&HttpSession::on_write, shared_from_this(), res->need_eof()));
  }

  void on_write(bool close, beast::error_code ec, std::size_t) {
    response_.reset();
    if (ec) return;
    if (close) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    read();
  }

  beast::tcp_stream stream_;
  Server::Impl& impl_;
  beast::flat_buffer buffer_;
  Request request_;
  std::shared_ptr<void> response_;
};

void accept(Server::Impl& impl) {
  impl.acceptor.async_accept(net::make_strand(impl.ioc), [&impl](beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted) return;
    if (!ec) std::make_shared<HttpSession>(std::move(socket), impl)->run();
    if (impl.acceptor.is_open()) accept(impl);
  });
}

}  // namespace

Server::Server(SessionManager& manager, ServerOptions options)
    : impl_(std::make_unique<Impl>(manager, std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& impl = *impl_;
  if (impl.running) return;
  try {
    const tcp::endpoint endpoint(net::ip::make_address(impl.options.address), impl.options.port);
    impl.acceptor.open(endpoint.protocol());
    impl.acceptor.set_option(net::socket_base::reuse_address(true));
    impl.acceptor.bind(endpoint);
    impl.acceptor.listen(net::socket_base::max_listen_connections);
  } catch (const boost::system::system_error& e) {
    beast::error_code ignored;
    impl.acceptor.close(ignored);
    throw std::system_error(e.code().value(), std::generic_category(), e.what());
  }
  impl.bound_port = impl.acceptor.local_endpoint().port();
  impl.workers.emplace(std::max(1u, impl.options.worker_threads));
  accept(impl);
  impl.running = true;
  for (unsigned i = 0; i < std::max(1u, impl.options.io_threads); ++i)
    impl.threads.emplace_back([&impl] { impl.ioc.run(); });
  impl.log("listening on " + impl.options.address + ":" + std::to_string(impl.bound_port));
}

std::uint16_t Server::port() const { return impl_->bound_port; }

void Server::stop() {
  auto& impl = *impl_;
  if (!impl.running) return;
  impl.running = false;
  net::post(impl.ioc, [&impl] {
    beast::error_code ec;
    impl.acceptor.close(ec);
  });
  impl.workers->join();
  impl.ioc.stop();
  for (auto& t : impl.threads) t.join();
  impl.threads.clear();
  impl.log("stopped");
}

}  // namespace affectgate::session
