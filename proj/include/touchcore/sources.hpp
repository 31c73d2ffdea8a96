#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "touchcore/input.hpp"
#include "touchcore/tuio.hpp"

namespace touchcore {

enum class InputErrc { UnknownSession, InvalidViewport };

class InputError : public std::runtime_error {
 public:
  InputError(InputErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  InputErrc code() const noexcept { return code_; }

 private:
  InputErrc code_;
};

/// Maps tracker transitions to cursor events in scene units. Each TUIO session
/// gets a fresh source-local cursor id at BIRTH, retired at DEATH, so session
/// ids reused by a restarted tracker never alias a live cursor.
class TuioAdapter {
 public:
  /// Atomic: on UnknownSession nothing is emitted and no mapping changes.
  std::vector<UnifiedInputEvent> adapt(std::span<const CursorTransition> transitions,
                                       Viewport viewport);

  /// CANCEL for every mapped session; clears the mapping.
  std::vector<UnifiedInputEvent> cancel_all();

  std::size_t live() const { return sessions_.size(); }

 private:
  struct Session {
    std::uint64_t raw = 0;
    Vec2 position;
  };
  std::map<std::int32_t, Session> sessions_;
  std::uint64_t next_raw_ = 1;
};

struct PointerSample {
  Vec2 position;
  bool button_down = false;
  std::uint64_t pointer_id = 0;
};

/// Mouse-style pointers. Each pointer id is an independent cursor, so several
/// mice (or pinned cursors) form multi-touch input. Hover produces nothing.
class PointerAdapter {
 public:
  std::vector<UnifiedInputEvent> adapt(const PointerSample& sample);
  std::vector<UnifiedInputEvent> cancel_all();

  std::size_t pressed() const { return pressed_.size(); }

 private:
  std::map<std::uint64_t, Vec2> pressed_;
};

/// TUIO 1.1 2Dcur over OSC. Owned by one network thread at a time.
class TuioSource final : public InputSource {
 public:
  TuioSource(InputQueue& queue, Clock& clock, Viewport viewport, std::string source_id = "tuio",
             std::uint8_t priority = 1);

  /// Decodes, tracks and emits one packet. Malformed packets are counted and
  /// otherwise ignored.
  void ingest_packet(std::span<const std::uint8_t> packet);
  void ingest_frame(const TuioFrame& frame);

  /// Cancels every live cursor of this source.
  void shutdown();

  std::uint64_t dropped_frames() const { return dropped_frames_.load(); }
  std::uint64_t malformed_packets() const { return malformed_packets_.load(); }
  std::uint64_t ignored_packets() const { return ignored_packets_.load(); }
  std::uint64_t clamped_coordinates() const { return clamped_.load(); }

 private:
  Viewport viewport_;
  TuioTrackerState state_;
  TuioAdapter adapter_;
  std::atomic<std::uint64_t> dropped_frames_{0};
  std::atomic<std::uint64_t> malformed_packets_{0};
  std::atomic<std::uint64_t> ignored_packets_{0};
  std::atomic<std::uint64_t> clamped_{0};
};

class PointerSource final : public InputSource {
 public:
  PointerSource(InputQueue& queue, Clock& clock, std::string source_id = "pointer",
                std::uint8_t priority = 0)
      : InputSource(std::move(source_id), priority, queue, clock) {}

  void handle(const PointerSample& sample) { emit(adapter_.adapt(sample)); }
  void shutdown() { emit(adapter_.cancel_all()); }

 private:
  PointerAdapter adapter_;
};

/// Keyboard provider. Keys never become cursor events; no keyboard-consuming
/// widget exists, so this source only counts what it sees.
class KeyboardSource final : public InputSource {
 public:
  KeyboardSource(InputQueue& queue, Clock& clock, std::string source_id = "keyboard",
                 std::uint8_t priority = 3)
      : InputSource(std::move(source_id), priority, queue, clock) {}

  void handle_key(int /*key_code*/, bool /*pressed*/) { ++keys_seen_; }
  std::uint64_t keys_seen() const { return keys_seen_; }

 private:
  std::uint64_t keys_seen_ = 0;
};

}  // namespace touchcore
