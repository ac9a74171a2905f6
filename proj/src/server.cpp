#include "smartlet/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include <atomic>
#include <deque>
#include <iostream>

#include "smartlet/errors.hpp"
#include "smartlet/protocol.hpp"
#include "smartlet/session.hpp"

namespace smartlet::server {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using proto::json;

namespace {

std::atomic<std::uint64_t> g_next_session{1};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, const Options& options)
      : ws_(std::move(socket)), options_(options) {}

  /// Joins the session runner; for server teardown once the I/O loop is idle.
  void shutdown() { close_session(); }

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(beast::bind_front_handler(&Connection::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&Connection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      close_session();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle(text);
    do_read();
  }

  void close_session() {
    if (session_) {
      spdlog::info("session {} closed", session_->id());
      session_->stop();
      session_.reset();
    }
  }

  void error(std::int64_t ack_seq, const std::string& code, const std::string& message) {
    json p{{"code", code}, {"message", message}};
    if (ack_seq >= 0) p["ack_seq"] = ack_seq;
    enqueue("error", p, false);
  }

  void handle(const std::string& text) {
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::exception& e) {
      error(-1, "malformed", std::string("invalid JSON: ") + e.what());
      return;
    }
    if (!msg.is_object() || !msg.contains("kind") || !msg["kind"].is_string() ||
        !msg.contains("seq") || !msg["seq"].is_number_integer()) {
      error(-1, "malformed", "envelope needs integer seq and string kind");
      return;
    }
    const auto seq = msg["seq"].get<std::int64_t>();
    const auto kind = msg["kind"].get<std::string>();
    json payload = msg.value("payload", json::object());
    if (seq <= last_client_seq_) {
      error(seq, "bad_seq", "seq must increase strictly");
      return;
    }
    last_client_seq_ = seq;

    if (kind == "hello") {
      if (session_) {
        error(seq, "protocol", "hello already completed");
        return;
      }
      const int version = payload.value("protocol", 0);
      if (version != proto::kProtocolVersion) {
        error(seq, "unsupported_version",
              "server speaks protocol " + std::to_string(proto::kProtocolVersion));
        return;
      }
      session_id_ = "s" + std::to_string(g_next_session++);
      // The runner thread only ever holds a weak reference, so the
      // connection (and its session) is destroyed on the I/O thread.
      std::weak_ptr<Connection> weak = shared_from_this();
      session_ = std::make_unique<session::Session>(
          session_id_,
          [weak, ex = ws_.get_executor()](const std::string& k, json p, bool droppable) {
            net::post(ex, [weak, k, p = std::move(p), droppable]() mutable {
              if (auto self = weak.lock()) self->enqueue(k, std::move(p), droppable);
            });
          },
          options_.snapshot_rate);
      spdlog::info("session {} opened", session_id_);
      enqueue("hello",
              json{{"ack_seq", seq},
                   {"protocol", proto::kProtocolVersion},
                   {"server", "smartlet"},
                   {"session_id", session_id_},
                   {"snapshot_rate", options_.snapshot_rate}},
              false);
      return;
    }
    if (!session_) {
      error(seq, "handshake_required", "send hello first");
      return;
    }
    if (msg.value("session_id", std::string{}) != session_id_) {
      error(seq, "unknown_session", "unknown session '" + msg.value("session_id", std::string{}) + "'");
      return;
    }
    session_->submit(seq, kind, std::move(payload));
  }

  /// On the connection's strand only.
  void enqueue(const std::string& kind, json payload, bool droppable) {
    const auto seq = ++out_seq_;
    if (droppable && out_.size() >= options_.max_queue) {
      ++dropped_;
      return;  // the seq gap tells the client
    }
    out_.push_back(proto::envelope(session_id_, seq, kind, std::move(payload)).dump());
    if (out_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(out_.front()),
                    beast::bind_front_handler(&Connection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      out_.clear();
      return;
    }
    out_.pop_front();
    if (!out_.empty()) do_write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  Options options_;
  beast::flat_buffer buffer_;
  std::deque<std::string> out_;
  std::int64_t out_seq_ = 0;
  std::int64_t last_client_seq_ = -1;
  std::uint64_t dropped_ = 0;
  std::string session_id_;
  std::unique_ptr<session::Session> session_;
};

}  // namespace

struct Server::Impl {
  Options options;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};

  std::vector<std::weak_ptr<Connection>> connections;

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket s) {
      if (ec) return;
      auto c = std::make_shared<Connection>(std::move(s), options);
      std::erase_if(connections, [](const auto& w) { return w.expired(); });
      connections.push_back(c);
      c->start();
      accept();
    });
  }

  ~Impl() {
    // Runners must finish before the io_context they post to goes away.
    ioc.stop();
    for (auto& w : connections) {
      if (auto c = w.lock()) c->shutdown();
    }
  }
};

Server::Server(Options options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
  const tcp::endpoint ep(net::ip::make_address(options.host), options.port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
  impl_->accept();
}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() { impl_->ioc.run(); }

void Server::stop() { impl_->ioc.stop(); }

Options parse_bind(const std::string& bind, double snapshot_rate) {
  Options o;
  o.snapshot_rate = snapshot_rate;
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw InvalidParameter("bind must be HOST:PORT");
  o.host = bind.substr(0, colon);
  const int port = std::stoi(bind.substr(colon + 1));
  if (port < 0 || port > 65535) throw InvalidParameter("port out of range");
  o.port = static_cast<std::uint16_t>(port);
  if (!(snapshot_rate > 0)) throw InvalidParameter("snapshot rate must be > 0");
  return o;
}

int serve(const std::string& bind, double snapshot_rate) {
  Server server(parse_bind(bind, snapshot_rate));
  net::io_context signals_ctx;
  net::signal_set signals(signals_ctx, SIGINT, SIGTERM);
  signals.async_wait([&](beast::error_code, int) { server.stop(); });
  std::thread sig([&] { signals_ctx.run(); });
  std::cerr << "smartlet serving on " << bind.substr(0, bind.rfind(':')) << ":" << server.port()
            << "\n";
  server.run();
  signals_ctx.stop();
  sig.join();
  return 0;
}

}  // namespace smartlet::server
