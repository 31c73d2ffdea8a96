#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "touchcore/geometry.hpp"
#include "touchcore/ids.hpp"

namespace touchcore {

enum class Phase : std::uint8_t { Down, Move, Up, Cancel };

std::string_view to_string(Phase phase);
std::optional<Phase> parse_phase(std::string_view text);

struct Viewport {
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const Viewport&, const Viewport&) = default;
};

/// The source-independent cursor event every input device is normalized into.
struct UnifiedInputEvent {
  std::uint64_t event_id = 0;  // assigned by InputQueue::drain_ordered
  CursorId cursor_id{};        // assigned by InputQueue::drain_ordered
  std::string source_id;
  std::uint64_t raw_cursor = 0;  // cursor identity within its source
  Phase phase = Phase::Down;
  Vec2 position;
  std::uint64_t timestamp = 0;  // microseconds on the engine clock
  std::optional<ComponentId> target;

  friend bool operator==(const UnifiedInputEvent&, const UnifiedInputEvent&) = default;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::uint64_t now_us() = 0;
};

/// Microseconds since construction, from std::chrono::steady_clock.
class MonotonicClock final : public Clock {
 public:
  std::uint64_t now_us() override {
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(
                                          std::chrono::steady_clock::now() - origin_)
                                          .count());
  }

 private:
  std::chrono::steady_clock::time_point origin_ = std::chrono::steady_clock::now();
};

/// Virtual time, advanced explicitly. Used for replay and tests.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::uint64_t start = 0) : now_(start) {}
  std::uint64_t now_us() override { return now_.load(); }
  void set(std::uint64_t t) { now_.store(t); }
  void advance(std::uint64_t dt) { now_.fetch_add(dt); }

 private:
  std::atomic<std::uint64_t> now_;
};

/// Ordering lane of a producer. Events are merged by (timestamp, priority,
/// lane name, arrival order within the lane).
struct Lane {
  std::string name;
  std::uint8_t priority = 0;  // lower drains first on timestamp ties
};

/// Many-producer, single-consumer merge point between input sources and the
/// engine thread. Also owns the mapping from source-local cursor identities
/// to engine cursor ids.
class InputQueue {
 public:
  /// Enqueues events with the timestamps they already carry.
  void push(const Lane& lane, std::vector<UnifiedInputEvent> events);

  /// Enqueues events stamped with one reading of `clock`, taken under the
  /// queue lock so a later drain never sees an earlier timestamp.
  void push_now(const Lane& lane, std::vector<UnifiedInputEvent> events, Clock& clock);

  /// Returns all pending events in merge order with event and cursor ids
  /// assigned. Events that would break a cursor's DOWN MOVE* (UP|CANCEL)
  /// lifecycle are dropped and counted.
  std::vector<UnifiedInputEvent> drain_ordered();

  /// Cancels every live cursor (ascending cursor id). The rest of each
  /// cancelled cursor's lifecycle is swallowed when its source delivers it.
  std::vector<UnifiedInputEvent> cancel_all(std::uint64_t timestamp);

  std::size_t pending() const;
  std::size_t live_cursors() const { return live_count_; }
  std::uint64_t dropped_events() const { return dropped_; }

 private:
  struct Pending {
    UnifiedInputEvent event;
    std::uint8_t priority;
    std::string lane;
    std::uint64_t sequence;
  };
  struct LiveCursor {
    CursorId id;
    Vec2 position;
    bool cancelled = false;
  };
  using CursorKey = std::pair<std::string, std::uint64_t>;

  void push_locked(const Lane& lane, std::vector<UnifiedInputEvent>& events);
  bool admit(UnifiedInputEvent& ev);

  mutable std::mutex mutex_;
  std::vector<Pending> pending_;
  std::map<std::string, std::uint64_t, std::less<>> lane_sequence_;

  // Consumer-side state, touched only by the draining thread.
  std::map<CursorKey, LiveCursor> live_;
  std::size_t live_count_ = 0;
  std::uint64_t next_event_id_ = 1;
  std::uint64_t next_cursor_id_ = 1;
  std::uint64_t dropped_ = 0;
};

/// Base of all input providers. A concrete source converts its device data
/// into UnifiedInputEvents (timestamps and engine ids left unset) and emits
/// them; the queue stamps and orders them.
class InputSource {
 public:
  InputSource(std::string source_id, std::uint8_t priority, InputQueue& queue, Clock& clock)
      : lane_{std::move(source_id), priority}, queue_(&queue), clock_(&clock) {}
  virtual ~InputSource() = default;

  InputSource(const InputSource&) = delete;
  InputSource& operator=(const InputSource&) = delete;

  const std::string& source_id() const { return lane_.name; }
  std::uint8_t priority() const { return lane_.priority; }

 protected:
  void emit(std::vector<UnifiedInputEvent> events);
  Clock& clock() { return *clock_; }
  InputQueue& queue() { return *queue_; }
  const Lane& lane() const { return lane_; }

 private:
  Lane lane_;
  InputQueue* queue_;
  Clock* clock_;
};

}  // namespace touchcore
