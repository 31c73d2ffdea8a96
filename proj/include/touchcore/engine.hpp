#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "touchcore/global.hpp"
#include "touchcore/gesture.hpp"
#include "touchcore/input.hpp"
#include "touchcore/scene.hpp"
#include "touchcore/sources.hpp"
#include "touchcore/trace.hpp"

namespace touchcore {

inline constexpr std::string_view kVersion = "0.1.0";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EngineConfig {
  Viewport viewport{1024.0, 768.0};
  std::uint16_t tuio_port = 3333;
  std::uint16_t bridge_port = 3334;
  double tick_rate = 60.0;  // Hz
  TapConfig tap;
  double eps = kDefaultDegenerateSpan;
  std::string scene = "demo";

  /// Throws ConfigError.
  void validate() const;
  /// Tick period in whole microseconds.
  std::uint64_t tick_period_us() const;
};

/// Counters are cumulative over the engine's lifetime; tick_duration_us is
/// the cost of the tick that produced these stats.
struct FrameStats {
  std::uint64_t frame = 0;
  std::uint64_t events_in = 0;
  std::uint64_t gestures_out = 0;
  std::uint64_t tick_duration_us = 0;
  std::uint64_t dropped_tuio_frames = 0;
  std::uint64_t dropped_events = 0;
  std::uint64_t listener_failures = 0;
};

struct TickResult {
  std::vector<GestureEvent> gestures;
  std::shared_ptr<const SceneSnapshot> snapshot;
  FrameStats stats;
};

struct EngineCommand {
  enum class Kind { ChangeScene, Reset };
  Kind kind = Kind::Reset;
  std::string scene;  // ChangeScene only
};

/// The frame-ticked pipeline: queue drain, global processors, component
/// processors, listener dispatch, snapshot. tick(), change_scene() and
/// reset() belong to one engine thread; queue(), post() and
/// latest_snapshot() may be used from any thread.
class Engine {
 public:
  Engine(EngineConfig config, Clock& clock);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const EngineConfig& config() const { return config_; }
  InputQueue& queue() { return queue_; }
  Clock& clock() { return *clock_; }

  /// Scenes are built lazily on first use and keep their state until reset.
  void register_scene(const std::string& name, SceneFactory factory);
  std::vector<std::string> scene_names() const;
  bool has_scene(const std::string& name) const;

  Scene& scene() { return *current_; }
  const std::string& scene_name() const { return current_name_; }

  TickResult tick();

  /// Cancels every live cursor through the current scene, then switches.
  /// The resulting CANCELED gestures are reported by the next tick.
  /// Throws SceneError(UnknownScene).
  void change_scene(const std::string& name);
  /// Like change_scene, but rebuilds the current scene from its factory.
  void reset();

  /// Queues a command for the start of the next tick. Scene names are
  /// checked here so callers learn about UnknownScene immediately.
  void post(EngineCommand command);

  void set_trace_recorder(TraceRecorder* recorder) { recorder_ = recorder; }
  void watch_tuio_source(const TuioSource& source) { tuio_sources_.push_back(&source); }

  std::uint64_t frame() const { return frame_; }
  std::shared_ptr<const SceneSnapshot> latest_snapshot() const;

 private:
  void process(UnifiedInputEvent& ev, std::vector<GestureEvent>& out);
  void cancel_live_cursors();
  Scene& instantiate(const std::string& name);
  void switch_to(const std::string& name, bool rebuild);

  EngineConfig config_;
  Clock* clock_;
  InputQueue queue_;
  TargetResolver resolver_;
  CursorDisplay cursor_display_;
  std::vector<GlobalProcessor*> globals_;
  CursorLockTable locks_;

  mutable std::mutex registry_mutex_;
  std::map<std::string, SceneFactory> factories_;
  std::map<std::string, std::unique_ptr<Scene>> scenes_;
  Scene* current_ = nullptr;
  std::string current_name_;

  std::mutex command_mutex_;
  std::vector<EngineCommand> commands_;
  std::vector<GestureEvent> carried_;

  TraceRecorder* recorder_ = nullptr;
  std::vector<const TuioSource*> tuio_sources_;

  std::uint64_t frame_ = 0;
  FrameStats totals_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const SceneSnapshot> snapshot_;
};

/// Writes one gesture-log line per event.
void write_gesture_log(std::ostream& out, std::uint64_t frame,
                       std::span<const GestureEvent> gestures);

struct ReplayOptions {
  double speed = 0.0;  // 0 runs unpaced; k > 0 sleeps recorded gaps / k
  std::ostream* gesture_log = nullptr;
};

struct ReplayResult {
  std::uint64_t ticks = 0;
  std::uint64_t events = 0;
  std::uint64_t gestures = 0;
  std::string final_snapshot;  // scene document of the last tick
};

/// Delivers one tick's worth of records to the engine.
using ReplayFeed = std::function<void(std::span<const TraceRecord> group)>;
/// Builds the delivery path for one replay run.
using ReplayInput = std::function<ReplayFeed(Engine& engine, ManualClock& clock)>;

/// Headless run on virtual time, using the trace's viewport. Records are
/// grouped into ticks by t / tick period; only non-empty groups are ticked.
/// By default records are pushed through a ReplaySource.
ReplayResult replay_trace(const Trace& trace, EngineConfig config,
                          const ReplayOptions& options = {}, const ReplayInput& input = {});

struct BenchConfig {
  std::uint64_t events = 100'000;
  std::uint64_t components = 100;
  double offered_rate = 100'000.0;  // events per second of virtual time
  double tick_rate = 60.0;
  std::uint64_t seed = 1;
};

struct BenchReport {
  std::uint64_t events = 0;
  std::uint64_t ticks = 0;
  std::uint64_t gestures = 0;
  double seconds = 0.0;  // busy time spent pushing and ticking
  double events_per_second = 0.0;
  double p99_tick_us = 0.0;
};

/// Grid of interactive rectangles driven by synthetic one- and two-finger
/// touches, ticked back to back.
BenchReport run_bench(const BenchConfig& config);

}  // namespace touchcore
