#include "touchcore/gesture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "touchcore/text.hpp"

namespace touchcore {

std::string_view to_string(GestureKind kind) {
  switch (kind) {
    case GestureKind::Drag:
      return "drag";
    case GestureKind::Rotate:
      return "rotate";
    case GestureKind::Scale:
      return "scale";
    case GestureKind::Tap:
      return "tap";
    case GestureKind::ZoomPan:
      return "zoom_pan";
  }
  return "?";
}

std::string_view to_string(GesturePhase phase) {
  switch (phase) {
    case GesturePhase::Started:
      return "started";
    case GesturePhase::Updated:
      return "updated";
    case GesturePhase::Ended:
      return "ended";
    case GesturePhase::Canceled:
      return "canceled";
  }
  return "?";
}

namespace {

void field(std::string& out, std::string_view key, double v) {
  out += ",\"";
  out += key;
  out += "\":";
  append_double(out, v);
}

}  // namespace

std::string format_gesture_record(std::uint64_t frame, const GestureEvent& ev) {
  std::string out = "{\"frame\":";
  append_uint(out, frame);
  out += ",\"kind\":\"";
  out += to_string(ev.kind);
  out += "\",\"phase\":\"";
  out += to_string(ev.phase);
  out += "\",\"target\":";
  append_uint(out, to_underlying(ev.target));
  switch (ev.kind) {
    case GestureKind::Drag:
      field(out, "dx", ev.translation.x);
      field(out, "dy", ev.translation.y);
      break;
    case GestureKind::Rotate:
      field(out, "angle", ev.angle);
      field(out, "px", ev.pivot.x);
      field(out, "py", ev.pivot.y);
      break;
    case GestureKind::Scale:
      field(out, "factor", ev.factor);
      field(out, "px", ev.pivot.x);
      field(out, "py", ev.pivot.y);
      break;
    case GestureKind::Tap:
      field(out, "x", ev.position.x);
      field(out, "y", ev.position.y);
      break;
    case GestureKind::ZoomPan:
      field(out, "dx", ev.translation.x);
      field(out, "dy", ev.translation.y);
      field(out, "factor", ev.factor);
      field(out, "px", ev.pivot.x);
      field(out, "py", ev.pivot.y);
      break;
  }
  out += '}';
  return out;
}

std::optional<RotateStep> rotate_step(Vec2 p1, Vec2 p1_now, Vec2 p2, Vec2 p2_now, double eps) {
  const Vec2 v0 = p2 - p1;
  const Vec2 v1 = p2_now - p1_now;
  if (!(length(v0) > eps) || !(length(v1) > eps)) {
    return std::nullopt;
  }
  double angle = std::atan2(cross(v0, v1), dot(v0, v1));
  if (angle == -std::numbers::pi) {
    angle = std::numbers::pi;
  }
  return RotateStep{angle, midpoint(p1_now, p2_now)};
}

std::optional<ScaleStep> scale_step(Vec2 p1, Vec2 p1_now, Vec2 p2, Vec2 p2_now, double eps) {
  const double before = distance(p1, p2);
  const double after = distance(p1_now, p2_now);
  if (!(before > eps) || !(after > eps)) {
    return std::nullopt;
  }
  return ScaleStep{after / before, midpoint(p1_now, p2_now)};
}

Vec2 centroid(std::span<const Vec2> points) {
  Vec2 sum;
  for (const auto& p : points) {
    sum = sum + p;
  }
  return points.empty() ? sum : sum / static_cast<double>(points.size());
}

Vec2 drag_step(std::span<const Vec2> current, Vec2 previous_centroid) {
  return centroid(current) - previous_centroid;
}

std::optional<Vec2> tap_detect(std::span<const CursorSample> history, const TapConfig& config) {
  if (history.size() < 2 || history.front().phase != Phase::Down ||
      history.back().phase != Phase::Up) {
    return std::nullopt;
  }
  const auto& down = history.front();
  if (history.back().timestamp - down.timestamp > config.max_time_us) {
    return std::nullopt;
  }
  for (const auto& s : history) {
    if (distance(s.position, down.position) > config.max_distance) {
      return std::nullopt;
    }
  }
  return down.position;
}

namespace {

template <typename Cursors>
auto find_cursor(Cursors& cursors, CursorId id) {
  return std::find_if(cursors.begin(), cursors.end(),
                      [id](const auto& c) { return c.first == id; });
}

template <typename Cursors>
Vec2 cursor_centroid(const Cursors& cursors) {
  Vec2 sum;
  for (const auto& c : cursors) {
    sum = sum + c.second;
  }
  return sum / static_cast<double>(cursors.size());
}

GestureEvent make_gesture(GestureKind kind, GesturePhase phase, ComponentId target) {
  GestureEvent g;
  g.kind = kind;
  g.phase = phase;
  g.target = target;
  return g;
}

}  // namespace

void DragProcessor::process(const UnifiedInputEvent& ev, ComponentId target,
                            std::vector<GestureEvent>& out) {
  auto it = find_cursor(cursors_, ev.cursor_id);
  switch (ev.phase) {
    case Phase::Down:
      if (it != cursors_.end()) {
        return;
      }
      cursors_.emplace_back(ev.cursor_id, ev.position);
      previous_ = cursor_centroid(cursors_);
      if (cursors_.size() == 1) {
        out.push_back(make_gesture(kind(), GesturePhase::Started, target));
      }
      return;
    case Phase::Move: {
      if (it == cursors_.end()) {
        return;
      }
      it->second = ev.position;
      auto g = make_gesture(kind(), GesturePhase::Updated, target);
      const Vec2 now = cursor_centroid(cursors_);
      g.translation = now - previous_;
      previous_ = now;
      out.push_back(g);
      return;
    }
    case Phase::Up:
    case Phase::Cancel:
      if (it == cursors_.end()) {
        return;
      }
      cursors_.erase(it);
      if (cursors_.empty()) {
        out.push_back(make_gesture(
            kind(), ev.phase == Phase::Up ? GesturePhase::Ended : GesturePhase::Canceled, target));
      } else {
        previous_ = cursor_centroid(cursors_);
      }
      return;
  }
}

void TapProcessor::process(const UnifiedInputEvent& ev, ComponentId target,
                           std::vector<GestureEvent>& out) {
  const CursorSample sample{ev.phase, ev.position, ev.timestamp};
  if (ev.phase == Phase::Down) {
    histories_[ev.cursor_id] = {sample};
    return;
  }
  auto it = histories_.find(ev.cursor_id);
  if (it == histories_.end()) {
    return;
  }
  it->second.push_back(sample);
  if (ev.phase == Phase::Move) {
    return;
  }
  if (const auto pos = tap_detect(it->second, config_)) {
    // A tap is instantaneous: its whole lifecycle is reported at release.
    auto g = make_gesture(kind(), GesturePhase::Started, target);
    g.position = *pos;
    out.push_back(g);
    g.phase = GesturePhase::Ended;
    out.push_back(g);
  }
  histories_.erase(it);
}

void PairGestureProcessor::rebase() {
  ref_a_ = cursors_[0].second;
  ref_b_ = cursors_[1].second;
}

GestureEvent PairGestureProcessor::boundary(GesturePhase phase, ComponentId target) const {
  auto g = make_gesture(kind(), phase, target);
  g.pivot = midpoint(ref_a_, ref_b_);
  return g;
}

void PairGestureProcessor::process(const UnifiedInputEvent& ev, ComponentId target,
                                   std::vector<GestureEvent>& out) {
  auto it = find_cursor(cursors_, ev.cursor_id);
  switch (ev.phase) {
    case Phase::Down:
      if (it != cursors_.end()) {
        return;
      }
      cursors_.emplace_back(ev.cursor_id, ev.position);
      if (!active_ && cursors_.size() >= 2) {
        active_ = true;
        rebase();
        out.push_back(boundary(GesturePhase::Started, target));
      }
      return;
    case Phase::Move: {
      if (it == cursors_.end()) {
        return;
      }
      it->second = ev.position;
      if (!active_ || it - cursors_.begin() >= 2) {
        return;  // spares do not drive the gesture
      }
      if (auto g = step(ref_a_, cursors_[0].second, ref_b_, cursors_[1].second)) {
        g->kind = kind();
        g->phase = GesturePhase::Updated;
        g->target = target;
        out.push_back(*g);
        rebase();
      } else if (!(distance(ref_a_, ref_b_) > eps_)) {
        // Nothing can be measured from a degenerate reference; start afresh.
        rebase();
      }
      return;
    }
    case Phase::Up:
    case Phase::Cancel: {
      if (it == cursors_.end()) {
        return;
      }
      const bool was_primary = it - cursors_.begin() < 2;
      cursors_.erase(it);
      if (!active_) {
        return;
      }
      if (cursors_.size() < 2) {
        active_ = false;
        out.push_back(boundary(
            ev.phase == Phase::Up ? GesturePhase::Ended : GesturePhase::Canceled, target));
      } else if (was_primary) {
        rebase();
      }
      return;
    }
  }
}

std::optional<GestureEvent> RotateProcessor::step(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) const {
  const auto s = rotate_step(a0, a1, b0, b1, eps_);
  if (!s) {
    return std::nullopt;
  }
  GestureEvent g;
  g.angle = s->angle;
  g.pivot = s->pivot;
  return g;
}

std::optional<GestureEvent> ScaleProcessor::step(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) const {
  const auto s = scale_step(a0, a1, b0, b1, eps_);
  if (!s) {
    return std::nullopt;
  }
  GestureEvent g;
  g.factor = s->factor;
  g.pivot = s->pivot;
  return g;
}

std::optional<GestureEvent> ZoomPanProcessor::step(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) const {
  const auto s = scale_step(a0, a1, b0, b1, eps_);
  if (!s) {
    return std::nullopt;
  }
  GestureEvent g;
  g.translation = midpoint(a1, b1) - midpoint(a0, b0);
  g.factor = s->factor;
  g.pivot = s->pivot;
  return g;
}

bool CursorLockTable::lock(CursorId cursor, ComponentId component,
                           std::vector<GestureKind> kinds) {
  return entries_.try_emplace(cursor, Entry{component, std::move(kinds)}).second;
}

const CursorLockTable::Entry* CursorLockTable::find(CursorId cursor) const {
  const auto it = entries_.find(cursor);
  return it == entries_.end() ? nullptr : &it->second;
}

void CursorLockTable::release(CursorId cursor) { entries_.erase(cursor); }

std::vector<GestureEvent> process_component_event(
    const UnifiedInputEvent& ev, CursorLockTable& locks,
    std::span<const std::unique_ptr<GestureProcessor>> processors) {
  std::vector<GestureEvent> out;
  if (!ev.target) {
    return out;
  }
  const ComponentId target = *ev.target;

  if (ev.phase == Phase::Down) {
    std::vector<GestureKind> kinds;
    kinds.reserve(processors.size());
    for (const auto& p : processors) {
      kinds.push_back(p->kind());
    }
    if (!locks.lock(ev.cursor_id, target, std::move(kinds))) {
      return out;
    }
    for (const auto& p : processors) {
      p->process(ev, target, out);
    }
    return out;
  }

  const auto* entry = locks.find(ev.cursor_id);
  if (entry == nullptr || entry->component != target) {
    return out;
  }
  for (const auto& p : processors) {
    if (std::find(entry->kinds.begin(), entry->kinds.end(), p->kind()) != entry->kinds.end()) {
      p->process(ev, target, out);
    }
  }
  if (ev.phase == Phase::Up || ev.phase == Phase::Cancel) {
    locks.release(ev.cursor_id);
  }
  return out;
}

DispatchResult dispatch(const GestureEvent& ev, std::span<const GestureListener> listeners) {
  DispatchResult result;
  for (const auto& listener : listeners) {
    ++result.invoked;
    try {
      listener(ev);
    } catch (const std::exception& e) {
      ++result.failed;
      spdlog::warn("gesture listener for {} on component {} failed: {}", to_string(ev.kind),
                   to_underlying(ev.target), e.what());
    } catch (...) {
      ++result.failed;
      spdlog::warn("gesture listener for {} on component {} failed", to_string(ev.kind),
                   to_underlying(ev.target));
    }
  }
  return result;
}

}  // namespace touchcore
