#include "touchcore/server.hpp"

#include <array>
#include <atomic>
#include <csignal>
#include <chrono>
#include <deque>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "touchcore/bridge.hpp"

namespace touchcore {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using udp = asio::ip::udp;
using Message = std::shared_ptr<const std::string>;

constexpr std::size_t kMaxBacklog = 64;
constexpr std::size_t kMaxClientMessage = 1 << 20;

struct TickMessages {
  Message snapshot;
  std::vector<Message> gestures;
  Message stats;
};

class BridgeSession;

/// Network-thread state shared by all sessions.
struct Hub {
  Engine* engine = nullptr;
  Clock* clock = nullptr;
  std::set<std::shared_ptr<BridgeSession>> sessions;
  std::uint64_t next_client = 1;
};

class BridgeSession : public std::enable_shared_from_this<BridgeSession> {
 public:
  BridgeSession(tcp::socket socket, Hub& hub)
      : ws_(std::move(socket)),
        hub_(&hub),
        source_(hub.engine->queue(), *hub.clock, "bridge:" + std::to_string(hub.next_client++)) {}

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxClientMessage);
    ws_.async_accept(beast::bind_front_handler(&BridgeSession::on_accept, shared_from_this()));
  }

  void send_tick(const TickMessages& tick) {
    if (closed_) {
      return;
    }
    if (outbox_.size() + tick.gestures.size() + 2 > kMaxBacklog) {
      // Too far behind: keep only what is on the wire and the newest snapshot.
      outbox_.erase(outbox_.begin() + (writing_ ? 1 : 0), outbox_.end());
      ++dropped_;
      outbox_.push_back(tick.snapshot);
      flush();
      return;
    }
    outbox_.push_back(tick.snapshot);
    outbox_.insert(outbox_.end(), tick.gestures.begin(), tick.gestures.end());
    outbox_.push_back(tick.stats);
    flush();
  }

  void send(Message message) {
    if (closed_) {
      return;
    }
    outbox_.push_back(std::move(message));
    flush();
  }

  void close_socket() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

  /// Cancels the client's live cursors; idempotent.
  void finish() {
    if (closed_) {
      return;
    }
    closed_ = true;
    source_.shutdown();
    if (dropped_ > 0) {
      spdlog::info("{}: skipped {} backlogged ticks", source_.source_id(), dropped_);
    }
    spdlog::info("{} disconnected", source_.source_id());
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) {
      spdlog::warn("websocket handshake failed: {}", ec.message());
      return;
    }
    spdlog::info("{} connected", source_.source_id());
    hub_->sessions.insert(shared_from_this());
    const auto scenes = hub_->engine->scene_names();
    send(std::make_shared<const std::string>(
        format_hello_message(scenes, hub_->engine->config().viewport)));
    if (auto snap = hub_->engine->latest_snapshot()) {
      send(std::make_shared<const std::string>(format_snapshot_message(*snap)));
    }
    read();
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&BridgeSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t /*bytes*/) {
    if (ec) {
      finish();
      hub_->sessions.erase(shared_from_this());
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle(text);
    read();
  }

  void handle(const std::string& text) {
    try {
      const auto message = parse_client_message(text);
      if (const auto* input = std::get_if<InputMessage>(&message)) {
        source_.handle(*input);
      } else {
        hub_->engine->post(std::get<EngineCommand>(message));
      }
    } catch (const BridgeError& e) {
      spdlog::warn("{}: {}", source_.source_id(), e.what());
      send(std::make_shared<const std::string>(format_error_message(to_string(e.code()), e.what())));
    } catch (const SceneError& e) {
      spdlog::warn("{}: {}", source_.source_id(), e.what());
      send(std::make_shared<const std::string>(format_error_message("UnknownScene", e.what())));
    }
  }

  void flush() {
    if (writing_ || outbox_.empty()) {
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(*outbox_.front()),
                    beast::bind_front_handler(&BridgeSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t /*bytes*/) {
    writing_ = false;
    if (!outbox_.empty()) {
      outbox_.pop_front();
    }
    if (ec) {
      outbox_.clear();
      close_socket();
      return;
    }
    flush();
  }

  websocket::stream<beast::tcp_stream> ws_;
  Hub* hub_;
  BridgeInputSource source_;
  beast::flat_buffer buffer_;
  std::deque<Message> outbox_;  // front is on the wire while writing_
  bool writing_ = false;
  bool closed_ = false;
  std::uint64_t dropped_ = 0;
};

[[noreturn]] void port_in_use(const char* what, std::uint16_t port, const beast::error_code& ec) {
  throw BridgeError(BridgeErrc::PortInUse,
                    std::string(what) + " port " + std::to_string(port) + ": " + ec.message());
}

}  // namespace

struct Server::Impl {
  Impl(EngineConfig config, ServeOptions opts)
      : options(opts),
        engine(std::move(config), clock),
        acceptor(io),
        udp_socket(io),
        tuio(engine.queue(), clock, engine.config().viewport) {
    hub.engine = &engine;
    hub.clock = &clock;
    engine.watch_tuio_source(tuio);
    if (options.trace_out != nullptr) {
      recorder.emplace(*options.trace_out, TraceHeader{engine.config().viewport});
      engine.set_trace_recorder(&*recorder);
    }
    bind();
  }

  void bind() {
    beast::error_code ec;
    const udp::endpoint udp_endpoint(udp::v4(), engine.config().tuio_port);
    udp_socket.open(udp_endpoint.protocol(), ec);
    if (!ec) {
      udp_socket.bind(udp_endpoint, ec);
    }
    if (ec) {
      port_in_use("TUIO", engine.config().tuio_port, ec);
    }
    const tcp::endpoint tcp_endpoint(tcp::v4(), engine.config().bridge_port);
    acceptor.open(tcp_endpoint.protocol(), ec);
    if (!ec) {
      acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    }
    if (!ec) {
      acceptor.bind(tcp_endpoint, ec);
    }
    if (!ec) {
      acceptor.listen(asio::socket_base::max_listen_connections, ec);
    }
    if (ec) {
      port_in_use("bridge", engine.config().bridge_port, ec);
    }
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        return;
      }
      std::make_shared<BridgeSession>(std::move(socket), hub)->start();
      accept();
    });
  }

  void receive() {
    udp_socket.async_receive_from(asio::buffer(datagram), sender,
                                  [this](beast::error_code ec, std::size_t size) {
                                    if (ec) {
                                      return;
                                    }
                                    tuio.ingest_packet(std::span(datagram.data(), size));
                                    receive();
                                  });
  }

  void publish(const TickResult& tick) {
    auto messages = std::make_shared<TickMessages>();
    messages->snapshot = std::make_shared<const std::string>(format_snapshot_message(*tick.snapshot));
    for (const auto& g : tick.gestures) {
      messages->gestures.push_back(
          std::make_shared<const std::string>(format_gesture_message(tick.stats.frame, g)));
    }
    messages->stats = std::make_shared<const std::string>(format_stats_message(tick.stats));
    asio::post(io, [this, messages] {
      for (const auto& session : hub.sessions) {
        session->send_tick(*messages);
      }
    });
  }

  void after_tick(const TickResult& tick) {
    if (options.gesture_log != nullptr) {
      write_gesture_log(*options.gesture_log, tick.stats.frame, tick.gestures);
    }
    publish(tick);
    frames.store(tick.stats.frame);
  }

  void run() {
    auto work = asio::make_work_guard(io);
    asio::signal_set signals(io);
    if (options.handle_signals) {
      signals.add(SIGINT);
      signals.add(SIGTERM);
      signals.async_wait([this](beast::error_code ec, int signal) {
        if (!ec) {
          spdlog::info("signal {} received, shutting down", signal);
          stopping.store(true);
        }
      });
    }
    accept();
    receive();
    std::thread network([this] { io.run(); });
    spdlog::info("serving scene '{}': TUIO on udp/{}, bridge on ws://0.0.0.0:{}",
                 engine.scene_name(), udp_socket.local_endpoint().port(),
                 acceptor.local_endpoint().port());

    const auto period = std::chrono::microseconds(engine.config().tick_period_us());
    auto next = std::chrono::steady_clock::now();
    while (!stopping.load()) {
      after_tick(engine.tick());
      next += period;
      const auto now = std::chrono::steady_clock::now();
      if (next < now) {
        next = now;
      }
      std::this_thread::sleep_until(next);
    }

    asio::post(io, [this, &signals] {
      beast::error_code ec;
      signals.cancel(ec);
      acceptor.close(ec);
      udp_socket.close(ec);
      for (const auto& session : hub.sessions) {
        session->finish();
        session->close_socket();
      }
      hub.sessions.clear();
      io.stop();
    });
    network.join();
    tuio.shutdown();
    after_tick(engine.tick());
  }

  ServeOptions options;
  MonotonicClock clock;
  Engine engine;
  std::optional<TraceRecorder> recorder;
  asio::io_context io;
  tcp::acceptor acceptor;
  udp::socket udp_socket;
  std::array<std::uint8_t, 65536> datagram{};
  udp::endpoint sender;
  TuioSource tuio;
  Hub hub;
  std::atomic<bool> stopping{false};
  std::atomic<std::uint64_t> frames{0};
};

Server::Server(EngineConfig config, ServeOptions options)
    : impl_(std::make_unique<Impl>(std::move(config), options)) {}

Server::~Server() = default;

std::uint16_t Server::tuio_port() const { return impl_->udp_socket.local_endpoint().port(); }
std::uint16_t Server::bridge_port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() { impl_->run(); }
void Server::stop() { impl_->stopping.store(true); }
std::uint64_t Server::frames() const { return impl_->frames.load(); }

}  // namespace touchcore
