#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "touchcore/engine.hpp"
#include "touchcore/input.hpp"

namespace touchcore {

inline constexpr std::string_view kBridgeProtocol = "touchcore-bridge/1";

enum class BridgeErrc { MalformedClientMessage, PortInUse };

class BridgeError : public std::runtime_error {
 public:
  BridgeError(BridgeErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  BridgeErrc code() const noexcept { return code_; }

 private:
  BridgeErrc code_;
};

std::string_view to_string(BridgeErrc code);

struct BridgeCursor {
  std::uint64_t id = 0;  // client-chosen, unique among the client's live cursors
  Phase phase = Phase::Down;
  Vec2 position;

  friend bool operator==(const BridgeCursor&, const BridgeCursor&) = default;
};

struct InputMessage {
  std::vector<BridgeCursor> cursors;
};

using ClientMessage = std::variant<InputMessage, EngineCommand>;

// Client -> server, one JSON object per websocket text message:
//   {"type":"input","cursors":[{"id":1,"phase":"down","x":100,"y":100}]}
//   {"type":"command","name":"change_scene","args":{"scene":"demo"}}
//   {"type":"command","name":"reset"}
// "type" may be omitted on input messages.

/// Throws BridgeError(MalformedClientMessage).
ClientMessage parse_client_message(std::string_view text);
std::string format_input_message(const InputMessage& message);
std::string format_command_message(const EngineCommand& command);

// Server -> client. Snapshot and gesture messages are the scene document and
// gesture-log record with a leading "type" member.
std::string format_hello_message(std::span<const std::string> scenes, Viewport viewport);
std::string format_snapshot_message(const SceneSnapshot& snapshot);
std::string format_gesture_message(std::uint64_t frame, const GestureEvent& gesture);
std::string format_stats_message(const FrameStats& stats);
std::string format_error_message(std::string_view code, std::string_view message);

/// One bridge client's cursors, stamped on arrival like any live source.
class BridgeInputSource final : public InputSource {
 public:
  BridgeInputSource(InputQueue& queue, Clock& clock, std::string source_id,
                    std::uint8_t priority = 2)
      : InputSource(std::move(source_id), priority, queue, clock) {}

  void handle(const InputMessage& message);
  /// Cancels every cursor the client left down, e.g. on disconnect.
  void shutdown();

  std::size_t live() const { return live_.size(); }

 private:
  std::map<std::uint64_t, Vec2> live_;
};

/// Replay delivery that serializes every record as a bridge input message
/// and feeds it through a BridgeInputSource, with the clock set to the
/// record's timestamp.
ReplayInput bridge_replay_input();

}  // namespace touchcore
