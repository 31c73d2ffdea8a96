#include "touchcore/global.hpp"

namespace touchcore {

void TargetResolver::process(UnifiedInputEvent& ev, const Scene& scene) {
  if (ev.phase == Phase::Down) {
    const ComponentId target = scene.hit_test(ev.position).value_or(scene.canvas_id());
    targets_[ev.cursor_id] = target;
    ev.target = target;
    return;
  }
  const auto it = targets_.find(ev.cursor_id);
  ev.target = it != targets_.end() ? it->second : scene.canvas_id();
  if (ev.phase == Phase::Up || ev.phase == Phase::Cancel) {
    if (it != targets_.end()) {
      targets_.erase(it);
    }
  }
}

void CursorDisplay::process(UnifiedInputEvent& ev, const Scene& /*scene*/) {
  if (ev.phase == Phase::Up || ev.phase == Phase::Cancel) {
    cursors_.erase(ev.cursor_id);
  } else {
    cursors_[ev.cursor_id] = ev.position;
  }
}

std::vector<SnapshotCursor> CursorDisplay::cursors() const {
  std::vector<SnapshotCursor> out;
  out.reserve(cursors_.size());
  for (const auto& [id, position] : cursors_) {
    out.push_back({id, position});
  }
  return out;
}

}  // namespace touchcore
