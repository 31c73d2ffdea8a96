#pragma once

#include <map>
#include <vector>

#include "touchcore/input.hpp"
#include "touchcore/scene.hpp"

namespace touchcore {

/// First-stage processor. Sees every drained event, in order, before any
/// component does, and may rewrite it.
class GlobalProcessor {
 public:
  virtual ~GlobalProcessor() = default;
  virtual void process(UnifiedInputEvent& ev, const Scene& scene) = 0;
  /// Forget per-cursor state, e.g. after a scene change.
  virtual void reset() {}
};

/// DOWN takes the hit-tested component (the canvas when nothing is hit); the
/// rest of the lifecycle inherits that target wherever the cursor goes.
class TargetResolver final : public GlobalProcessor {
 public:
  void process(UnifiedInputEvent& ev, const Scene& scene) override;
  void reset() override { targets_.clear(); }

 private:
  std::map<CursorId, ComponentId> targets_;
};

/// Tracks live cursor positions for snapshots.
class CursorDisplay final : public GlobalProcessor {
 public:
  void process(UnifiedInputEvent& ev, const Scene& scene) override;
  void reset() override { cursors_.clear(); }

  std::vector<SnapshotCursor> cursors() const;

 private:
  std::map<CursorId, Vec2> cursors_;
};

}  // namespace touchcore
