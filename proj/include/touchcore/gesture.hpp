#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "touchcore/gesture_event.hpp"
#include "touchcore/input.hpp"

namespace touchcore {

/// Two-cursor spans at or below this length (scene units) are degenerate.
inline constexpr double kDefaultDegenerateSpan = 1e-6;

struct TapConfig {
  std::uint64_t max_time_us = 350'000;
  double max_distance = 12.0;
};

struct RotateStep {
  double angle = 0.0;  // (-pi, pi]
  Vec2 pivot;
};

struct ScaleStep {
  double factor = 1.0;
  Vec2 pivot;
};

/// Incremental rotation of the segment p1->p2 as both ends move to p1_now and
/// p2_now. Returns nullopt when either span is degenerate; callers skip the
/// step rather than cancelling the gesture.
std::optional<RotateStep> rotate_step(Vec2 p1, Vec2 p1_now, Vec2 p2, Vec2 p2_now,
                                      double eps = kDefaultDegenerateSpan);

/// Incremental span ratio, same conventions as rotate_step.
std::optional<ScaleStep> scale_step(Vec2 p1, Vec2 p1_now, Vec2 p2, Vec2 p2_now,
                                    double eps = kDefaultDegenerateSpan);

Vec2 centroid(std::span<const Vec2> points);

/// Centroid motion of the locked cursors since `previous_centroid`.
Vec2 drag_step(std::span<const Vec2> current, Vec2 previous_centroid);

struct CursorSample {
  Phase phase = Phase::Down;
  Vec2 position;
  std::uint64_t timestamp = 0;
};

/// Tap position (the DOWN position) for a completed DOWN .. UP history that
/// stayed within the time and distance bounds. Cancelled cursors never tap.
std::optional<Vec2> tap_detect(std::span<const CursorSample> history, const TapConfig& config = {});

/// Second-stage (per component) recognizer. Receives only events for cursors
/// locked to its component and appends any gestures it recognizes.
class GestureProcessor {
 public:
  virtual ~GestureProcessor() = default;
  virtual GestureKind kind() const = 0;
  virtual void process(const UnifiedInputEvent& ev, ComponentId target,
                       std::vector<GestureEvent>& out) = 0;
};

/// Centroid translation of all locked cursors; active while at least one is down.
class DragProcessor final : public GestureProcessor {
 public:
  GestureKind kind() const override { return GestureKind::Drag; }
  void process(const UnifiedInputEvent& ev, ComponentId target,
               std::vector<GestureEvent>& out) override;

 private:
  std::vector<std::pair<CursorId, Vec2>> cursors_;
  Vec2 previous_;
};

class TapProcessor final : public GestureProcessor {
 public:
  explicit TapProcessor(TapConfig config = {}) : config_(config) {}
  GestureKind kind() const override { return GestureKind::Tap; }
  void process(const UnifiedInputEvent& ev, ComponentId target,
               std::vector<GestureEvent>& out) override;

 private:
  TapConfig config_;
  std::map<CursorId, std::vector<CursorSample>> histories_;
};

/// Shared state machine for gestures over the two earliest-locked cursors.
/// Later cursors wait as spares and are promoted, in lock order, when a
/// primary lifts. Reference positions advance with every emitted step.
class PairGestureProcessor : public GestureProcessor {
 public:
  explicit PairGestureProcessor(double eps) : eps_(eps) {}
  void process(const UnifiedInputEvent& ev, ComponentId target,
               std::vector<GestureEvent>& out) final;

 protected:
  /// UPDATED payload for primaries moving a0->a1 and b0->b1, or nullopt if
  /// the step is degenerate.
  virtual std::optional<GestureEvent> step(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) const = 0;

  double eps_;

 private:
  void rebase();
  GestureEvent boundary(GesturePhase phase, ComponentId target) const;

  std::vector<std::pair<CursorId, Vec2>> cursors_;
  Vec2 ref_a_;
  Vec2 ref_b_;
  bool active_ = false;
};

class RotateProcessor final : public PairGestureProcessor {
 public:
  explicit RotateProcessor(double eps = kDefaultDegenerateSpan) : PairGestureProcessor(eps) {}
  GestureKind kind() const override { return GestureKind::Rotate; }

 protected:
  std::optional<GestureEvent> step(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) const override;
};

class ScaleProcessor final : public PairGestureProcessor {
 public:
  explicit ScaleProcessor(double eps = kDefaultDegenerateSpan) : PairGestureProcessor(eps) {}
  GestureKind kind() const override { return GestureKind::Scale; }

 protected:
  std::optional<GestureEvent> step(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) const override;
};

/// Two-finger pan plus pinch zoom, meant for the canvas.
class ZoomPanProcessor final : public PairGestureProcessor {
 public:
  explicit ZoomPanProcessor(double eps = kDefaultDegenerateSpan) : PairGestureProcessor(eps) {}
  GestureKind kind() const override { return GestureKind::ZoomPan; }

 protected:
  std::optional<GestureEvent> step(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) const override;
};

/// Binds each cursor to exactly one component for its whole lifetime, along
/// with the processor kinds that were registered when it landed.
class CursorLockTable {
 public:
  struct Entry {
    ComponentId component{};
    std::vector<GestureKind> kinds;
  };

  /// False if the cursor is already locked.
  bool lock(CursorId cursor, ComponentId component, std::vector<GestureKind> kinds);
  const Entry* find(CursorId cursor) const;
  void release(CursorId cursor);
  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<CursorId, Entry> entries_;
};

/// Component-level processing of one targeted event. DOWN locks the cursor to
/// the target and offers it to every processor; later phases reach only the
/// processors the cursor was locked with. UP and CANCEL release the lock.
std::vector<GestureEvent> process_component_event(
    const UnifiedInputEvent& ev, CursorLockTable& locks,
    std::span<const std::unique_ptr<GestureProcessor>> processors);

struct DispatchResult {
  std::size_t invoked = 0;
  std::size_t failed = 0;
};

/// Invokes each listener once, in order. A throwing listener is logged and
/// counted; the remaining listeners still run.
DispatchResult dispatch(const GestureEvent& ev, std::span<const GestureListener> listeners);

}  // namespace touchcore
