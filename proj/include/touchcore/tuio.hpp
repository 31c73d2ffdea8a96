#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "touchcore/osc.hpp"

namespace touchcore {

inline constexpr std::string_view kTuioCursorAddress = "/tuio/2Dcur";

/// Frames whose fseq trails the last accepted one by more than this are taken
/// as a tracker restart rather than a stale duplicate.
inline constexpr std::int32_t kFseqRestartWindow = 1000;

struct TuioCursorRecord {
  std::int32_t session_id = 0;
  float x = 0.0F;
  float y = 0.0F;
  float vx = 0.0F;
  float vy = 0.0F;
  float accel = 0.0F;

  friend bool operator==(const TuioCursorRecord&, const TuioCursorRecord&) = default;
};

struct TuioFrame {
  std::int32_t fseq = -1;  // -1: not sequenced
  std::vector<std::int32_t> alive;  // wire order, duplicates removed
  std::vector<TuioCursorRecord> sets;

  friend bool operator==(const TuioFrame&, const TuioFrame&) = default;
};

enum class TuioErrc { MissingAlive, MissingFseq, MalformedSet, MalformedAlive, MalformedFseq };

class TuioError : public std::runtime_error {
 public:
  TuioError(TuioErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  TuioErrc code() const noexcept { return code_; }

 private:
  TuioErrc code_;
};

struct TuioParseStats {
  std::uint64_t orphan_sets = 0;          // set records for sessions missing from alive
  std::uint64_t clamped_coordinates = 0;  // x or y pulled back into [0, 1]
  std::uint64_t ignored_messages = 0;     // other profiles, "source", unknown commands
};

/// True when at least one message belongs to the 2D cursor profile.
bool has_tuio_cursor_messages(std::span<const OscMessage> msgs);

/// Builds a frame from the 2Dcur messages of one bundle. Messages for other
/// profiles are skipped and counted in `stats`.
TuioFrame parse_tuio_frame(std::span<const OscMessage> msgs, TuioParseStats* stats = nullptr);

/// Encodes `frame` as the alive / set... / fseq message sequence of one bundle.
std::vector<OscMessage> tuio_frame_messages(const TuioFrame& frame);

enum class TransitionKind : std::uint8_t { Birth, Update, Death };

struct CursorTransition {
  TransitionKind kind = TransitionKind::Birth;
  std::int32_t session_id = 0;
  float x = 0.0F;
  float y = 0.0F;

  friend bool operator==(const CursorTransition&, const CursorTransition&) = default;
};

struct TuioTrackerState {
  std::int32_t last_fseq = -1;
  std::map<std::int32_t, TuioCursorRecord> live;
  std::uint64_t dropped_frames = 0;
};

/// Advances `state` by one frame and returns the resulting transitions:
/// deaths (ascending session id), then births, then updates (alive order).
/// Redundant frames leave the state untouched apart from `dropped_frames`.
std::vector<CursorTransition> track_tuio(const TuioFrame& frame, TuioTrackerState& state);

}  // namespace touchcore
