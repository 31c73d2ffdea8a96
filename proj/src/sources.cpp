#include "touchcore/sources.hpp"

#include <spdlog/spdlog.h>

namespace touchcore {
namespace {

UnifiedInputEvent make_event(std::uint64_t raw, Phase phase, Vec2 position) {
  UnifiedInputEvent ev;
  ev.raw_cursor = raw;
  ev.phase = phase;
  ev.position = position;
  return ev;
}

}  // namespace

std::vector<UnifiedInputEvent> TuioAdapter::adapt(std::span<const CursorTransition> transitions,
                                                  Viewport viewport) {
  if (!(viewport.width > 0.0) || !(viewport.height > 0.0)) {
    throw InputError(InputErrc::InvalidViewport, "viewport dimensions must be positive");
  }
  auto sessions = sessions_;
  auto next_raw = next_raw_;
  std::vector<UnifiedInputEvent> out;
  out.reserve(transitions.size());

  for (const auto& tr : transitions) {
    const Vec2 pos{static_cast<double>(tr.x) * viewport.width,
                   static_cast<double>(tr.y) * viewport.height};
    if (tr.kind == TransitionKind::Birth) {
      const auto raw = next_raw++;
      sessions.insert_or_assign(tr.session_id, Session{raw, pos});
      out.push_back(make_event(raw, Phase::Down, pos));
      continue;
    }
    auto it = sessions.find(tr.session_id);
    if (it == sessions.end()) {
      throw InputError(InputErrc::UnknownSession,
                       "transition for unmapped TUIO session " + std::to_string(tr.session_id));
    }
    if (tr.kind == TransitionKind::Update) {
      it->second.position = pos;
      out.push_back(make_event(it->second.raw, Phase::Move, pos));
    } else {
      out.push_back(make_event(it->second.raw, Phase::Up, pos));
      sessions.erase(it);
    }
  }

  sessions_ = std::move(sessions);
  next_raw_ = next_raw;
  return out;
}

std::vector<UnifiedInputEvent> TuioAdapter::cancel_all() {
  std::vector<UnifiedInputEvent> out;
  for (const auto& [id, s] : sessions_) {
    out.push_back(make_event(s.raw, Phase::Cancel, s.position));
  }
  sessions_.clear();
  return out;
}

std::vector<UnifiedInputEvent> PointerAdapter::adapt(const PointerSample& sample) {
  auto it = pressed_.find(sample.pointer_id);
  if (sample.button_down) {
    if (it == pressed_.end()) {
      pressed_.emplace(sample.pointer_id, sample.position);
      return {make_event(sample.pointer_id, Phase::Down, sample.position)};
    }
    it->second = sample.position;
    return {make_event(sample.pointer_id, Phase::Move, sample.position)};
  }
  if (it == pressed_.end()) {
    return {};  // hover
  }
  pressed_.erase(it);
  return {make_event(sample.pointer_id, Phase::Up, sample.position)};
}

std::vector<UnifiedInputEvent> PointerAdapter::cancel_all() {
  std::vector<UnifiedInputEvent> out;
  for (const auto& [id, pos] : pressed_) {
    out.push_back(make_event(id, Phase::Cancel, pos));
  }
  pressed_.clear();
  return out;
}

TuioSource::TuioSource(InputQueue& queue, Clock& clock, Viewport viewport, std::string source_id,
                       std::uint8_t priority)
    : InputSource(std::move(source_id), priority, queue, clock), viewport_(viewport) {
  if (!(viewport.width > 0.0) || !(viewport.height > 0.0)) {
    throw InputError(InputErrc::InvalidViewport, "viewport dimensions must be positive");
  }
}

void TuioSource::ingest_packet(std::span<const std::uint8_t> packet) {
  try {
    const auto msgs = decode_osc_packet(packet);
    if (!has_tuio_cursor_messages(msgs)) {
      ++ignored_packets_;
      return;
    }
    TuioParseStats stats;
    const auto frame = parse_tuio_frame(msgs, &stats);
    clamped_ += stats.clamped_coordinates;
    ingest_frame(frame);
  } catch (const std::exception& e) {
    ++malformed_packets_;
    spdlog::debug("{}: dropping malformed packet: {}", source_id(), e.what());
  }
}

void TuioSource::ingest_frame(const TuioFrame& frame) {
  const auto transitions = track_tuio(frame, state_);
  dropped_frames_.store(state_.dropped_frames);
  emit(adapter_.adapt(transitions, viewport_));
}

void TuioSource::shutdown() {
  state_.live.clear();
  emit(adapter_.cancel_all());
}

}  // namespace touchcore
