#include "touchcore/input.hpp"

#include <algorithm>
#include <tuple>

namespace touchcore {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Down:
      return "down";
    case Phase::Move:
      return "move";
    case Phase::Up:
      return "up";
    case Phase::Cancel:
      return "cancel";
  }
  return "?";
}

std::optional<Phase> parse_phase(std::string_view text) {
  if (text == "down") return Phase::Down;
  if (text == "move") return Phase::Move;
  if (text == "up") return Phase::Up;
  if (text == "cancel") return Phase::Cancel;
  return std::nullopt;
}

void InputQueue::push_locked(const Lane& lane, std::vector<UnifiedInputEvent>& events) {
  auto seq = lane_sequence_.find(lane.name);
  if (seq == lane_sequence_.end()) {
    seq = lane_sequence_.emplace(lane.name, 0).first;
  }
  for (auto& ev : events) {
    if (ev.source_id.empty()) {
      ev.source_id = lane.name;
    }
    pending_.push_back(Pending{std::move(ev), lane.priority, lane.name, seq->second++});
  }
}

void InputQueue::push(const Lane& lane, std::vector<UnifiedInputEvent> events) {
  std::lock_guard lock(mutex_);
  push_locked(lane, events);
}

void InputQueue::push_now(const Lane& lane, std::vector<UnifiedInputEvent> events, Clock& clock) {
  std::lock_guard lock(mutex_);
  const std::uint64_t now = clock.now_us();
  for (auto& ev : events) {
    ev.timestamp = now;
  }
  push_locked(lane, events);
}

std::size_t InputQueue::pending() const {
  std::lock_guard lock(mutex_);
  return pending_.size();
}

bool InputQueue::admit(UnifiedInputEvent& ev) {
  const CursorKey key{ev.source_id, ev.raw_cursor};
  auto it = live_.find(key);

  if (ev.phase == Phase::Down) {
    if (it != live_.end() && !it->second.cancelled) {
      ++dropped_;  // source reused a cursor identity that is still down
      return false;
    }
    const CursorId id{next_cursor_id_++};
    live_.insert_or_assign(key, LiveCursor{id, ev.position, false});
    ++live_count_;
    ev.cursor_id = id;
    return true;
  }

  if (it == live_.end()) {
    ++dropped_;
    return false;
  }
  if (it->second.cancelled) {
    // Remainder of a lifecycle the engine already cancelled.
    if (ev.phase != Phase::Move) {
      live_.erase(it);
    }
    return false;
  }
  ev.cursor_id = it->second.id;
  it->second.position = ev.position;
  if (ev.phase != Phase::Move) {
    live_.erase(it);
    --live_count_;
  }
  return true;
}

std::vector<UnifiedInputEvent> InputQueue::drain_ordered() {
  std::vector<Pending> batch;
  {
    std::lock_guard lock(mutex_);
    batch.swap(pending_);
  }
  std::sort(batch.begin(), batch.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.event.timestamp, a.priority, a.lane, a.sequence) <
           std::tie(b.event.timestamp, b.priority, b.lane, b.sequence);
  });

  std::vector<UnifiedInputEvent> out;
  out.reserve(batch.size());
  for (auto& p : batch) {
    if (admit(p.event)) {
      p.event.event_id = next_event_id_++;
      out.push_back(std::move(p.event));
    }
  }
  return out;
}

std::vector<UnifiedInputEvent> InputQueue::cancel_all(std::uint64_t timestamp) {
  std::vector<std::pair<CursorId, const CursorKey*>> order;
  for (const auto& [key, cursor] : live_) {
    if (!cursor.cancelled) {
      order.emplace_back(cursor.id, &key);
    }
  }
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<UnifiedInputEvent> out;
  out.reserve(order.size());
  for (const auto& [id, key] : order) {
    auto& cursor = live_.at(*key);
    UnifiedInputEvent ev;
    ev.event_id = next_event_id_++;
    ev.cursor_id = id;
    ev.source_id = key->first;
    ev.raw_cursor = key->second;
    ev.phase = Phase::Cancel;
    ev.position = cursor.position;
    ev.timestamp = timestamp;
    cursor.cancelled = true;
    out.push_back(std::move(ev));
  }
  live_count_ = 0;
  return out;
}

void InputSource::emit(std::vector<UnifiedInputEvent> events) {
  if (!events.empty()) {
    queue_->push_now(lane_, std::move(events), *clock_);
  }
}

}  // namespace touchcore
