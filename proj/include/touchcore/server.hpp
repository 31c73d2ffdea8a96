#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>

#include "touchcore/engine.hpp"

namespace touchcore {

struct ServeOptions {
  std::ostream* trace_out = nullptr;  // record mode
  std::ostream* gesture_log = nullptr;
  bool handle_signals = false;  // stop on SIGINT / SIGTERM
};

/// The engine behind its network front door: TUIO over UDP on tuio_port and
/// the websocket bridge on bridge_port (port 0 picks a free port). Sockets
/// are bound by the constructor, which throws BridgeError(PortInUse) when
/// either port is taken.
class Server {
 public:
  explicit Server(EngineConfig config, ServeOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t tuio_port() const;
  std::uint16_t bridge_port() const;

  /// Ticks at the configured rate on the calling thread until stop().
  /// Network I/O runs on a separate thread meanwhile.
  void run();
  /// Thread-safe; run() returns after finishing its current tick.
  void stop();

  std::uint64_t frames() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace touchcore
