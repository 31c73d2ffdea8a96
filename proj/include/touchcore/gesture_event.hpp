#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "touchcore/geometry.hpp"
#include "touchcore/ids.hpp"

namespace touchcore {

enum class GestureKind : std::uint8_t { Drag, Rotate, Scale, Tap, ZoomPan };
enum class GesturePhase : std::uint8_t { Started, Updated, Ended, Canceled };

std::string_view to_string(GestureKind kind);
std::string_view to_string(GesturePhase phase);

/// A recognized gesture step. All payloads are deltas since the previous
/// event of the same gesture; which fields are meaningful depends on `kind`:
///
///   Drag     translation
///   Rotate   angle, pivot
///   Scale    factor, pivot
///   Tap      position
///   ZoomPan  translation, factor, pivot
///
/// `angle` is counterclockwise-positive in standard math axes. Scene y points
/// down, so on screen a positive angle turns clockwise.
struct GestureEvent {
  GestureKind kind = GestureKind::Drag;
  GesturePhase phase = GesturePhase::Started;
  ComponentId target{};
  Vec2 translation;
  double angle = 0.0;
  double factor = 1.0;
  Vec2 pivot;
  Vec2 position;

  friend bool operator==(const GestureEvent&, const GestureEvent&) = default;
};

using GestureListener = std::function<void(const GestureEvent&)>;

/// One gesture-log line (no trailing newline). Keys are emitted in a fixed
/// order so logs of identical runs compare byte-for-byte.
std::string format_gesture_record(std::uint64_t frame, const GestureEvent& ev);

}  // namespace touchcore
