#include "touchcore/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

namespace touchcore {
namespace {

std::uint64_t elapsed_us(std::chrono::steady_clock::time_point since) {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(
                                        std::chrono::steady_clock::now() - since)
                                        .count());
}

std::unique_ptr<Scene> make_blank_scene(double eps) {
  auto scene = std::make_unique<Scene>("blank");
  enable_canvas_zoom_pan(*scene, eps);
  return scene;
}

}  // namespace

void EngineConfig::validate() const {
  if (!(viewport.width > 0.0) || !(viewport.height > 0.0) || !std::isfinite(viewport.width) ||
      !std::isfinite(viewport.height)) {
    throw ConfigError("viewport must be positive");
  }
  if (!(tick_rate > 0.0) || !std::isfinite(tick_rate)) {
    throw ConfigError("tick rate must be positive");
  }
  if (!(eps > 0.0)) {
    throw ConfigError("degenerate span threshold must be positive");
  }
  if (!(tap.max_distance >= 0.0)) {
    throw ConfigError("tap distance must not be negative");
  }
}

std::uint64_t EngineConfig::tick_period_us() const {
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(1e6 / tick_rate)));
}

Engine::Engine(EngineConfig config, Clock& clock) : config_(std::move(config)), clock_(&clock) {
  config_.validate();
  globals_ = {&resolver_, &cursor_display_};
  const Viewport viewport = config_.viewport;
  const TapConfig tap = config_.tap;
  const double eps = config_.eps;
  register_scene("demo", [=] { return make_demo_scene(viewport, tap, eps); });
  register_scene("blank", [=] { return make_blank_scene(eps); });
  if (!has_scene(config_.scene)) {
    throw SceneError(SceneErrc::UnknownScene, "unknown scene '" + config_.scene + "'");
  }
  current_ = &instantiate(config_.scene);
  current_name_ = config_.scene;

  auto snap = std::make_shared<SceneSnapshot>(current_->snapshot(0));
  snap->viewport = config_.viewport;
  snapshot_ = std::move(snap);
}

Engine::~Engine() = default;

void Engine::register_scene(const std::string& name, SceneFactory factory) {
  std::lock_guard lock(registry_mutex_);
  factories_[name] = std::move(factory);
}

std::vector<std::string> Engine::scene_names() const {
  std::lock_guard lock(registry_mutex_);
  std::vector<std::string> names;
  for (const auto& [name, factory] : factories_) {
    names.push_back(name);
  }
  return names;
}

bool Engine::has_scene(const std::string& name) const {
  std::lock_guard lock(registry_mutex_);
  return factories_.contains(name);
}

Scene& Engine::instantiate(const std::string& name) {
  auto it = scenes_.find(name);
  if (it == scenes_.end()) {
    SceneFactory factory;
    {
      std::lock_guard lock(registry_mutex_);
      factory = factories_.at(name);
    }
    it = scenes_.emplace(name, factory()).first;
  }
  return *it->second;
}

void Engine::process(UnifiedInputEvent& ev, std::vector<GestureEvent>& out) {
  for (auto* global : globals_) {
    global->process(ev, *current_);
  }
  const Component* component = current_->find(*ev.target);
  if (component == nullptr) {
    return;
  }
  for (const auto& g : process_component_event(ev, locks_, component->processors())) {
    totals_.listener_failures += dispatch(g, component->listeners(g.kind)).failed;
    out.push_back(g);
  }
}

void Engine::cancel_live_cursors() {
  auto cancels = queue_.cancel_all(clock_->now_us());
  if (recorder_ != nullptr) {
    recorder_->record(cancels);
  }
  for (auto& ev : cancels) {
    process(ev, carried_);
  }
  totals_.events_in += cancels.size();
}

void Engine::switch_to(const std::string& name, bool rebuild) {
  cancel_live_cursors();
  locks_.clear();
  for (auto* global : globals_) {
    global->reset();
  }
  if (rebuild) {
    current_ = nullptr;
    scenes_.erase(name);
  }
  current_ = &instantiate(name);
  current_name_ = name;
}

void Engine::change_scene(const std::string& name) {
  if (!has_scene(name)) {
    throw SceneError(SceneErrc::UnknownScene, "unknown scene '" + name + "'");
  }
  if (name == current_name_) {
    spdlog::info("scene '{}' is already active", name);
    return;
  }
  spdlog::info("changing scene '{}' -> '{}'", current_name_, name);
  switch_to(name, false);
}

void Engine::reset() {
  spdlog::info("resetting scene '{}'", current_name_);
  switch_to(current_name_, true);
}

void Engine::post(EngineCommand command) {
  if (command.kind == EngineCommand::Kind::ChangeScene && !has_scene(command.scene)) {
    throw SceneError(SceneErrc::UnknownScene, "unknown scene '" + command.scene + "'");
  }
  std::lock_guard lock(command_mutex_);
  commands_.push_back(std::move(command));
}

std::shared_ptr<const SceneSnapshot> Engine::latest_snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

TickResult Engine::tick() {
  const auto start = std::chrono::steady_clock::now();

  std::vector<EngineCommand> commands;
  {
    std::lock_guard lock(command_mutex_);
    commands.swap(commands_);
  }
  for (const auto& command : commands) {
    if (command.kind == EngineCommand::Kind::ChangeScene) {
      change_scene(command.scene);
    } else {
      reset();
    }
  }

  TickResult result;
  result.gestures = std::move(carried_);
  carried_.clear();

  auto events = queue_.drain_ordered();
  if (recorder_ != nullptr) {
    recorder_->record(events);
  }
  for (auto& ev : events) {
    process(ev, result.gestures);
  }

  ++frame_;
  auto snap = std::make_shared<SceneSnapshot>(current_->snapshot(frame_));
  snap->viewport = config_.viewport;
  snap->cursors = cursor_display_.cursors();

  totals_.frame = frame_;
  totals_.events_in += events.size();
  totals_.gestures_out += result.gestures.size();
  totals_.dropped_events = queue_.dropped_events();
  std::uint64_t dropped_frames = 0;
  for (const auto* source : tuio_sources_) {
    dropped_frames += source->dropped_frames();
  }
  totals_.dropped_tuio_frames = dropped_frames;
  totals_.tick_duration_us = elapsed_us(start);

  {
    std::lock_guard lock(snapshot_mutex_);
    snapshot_ = snap;
  }
  result.snapshot = std::move(snap);
  result.stats = totals_;
  return result;
}

void write_gesture_log(std::ostream& out, std::uint64_t frame,
                       std::span<const GestureEvent> gestures) {
  for (const auto& g : gestures) {
    out << format_gesture_record(frame, g) << '\n';
  }
}

ReplayResult replay_trace(const Trace& trace, EngineConfig config, const ReplayOptions& options,
                          const ReplayInput& input) {
  config.viewport = trace.header.viewport;
  ManualClock clock;
  Engine engine(config, clock);

  ReplayFeed feed;
  if (input) {
    feed = input(engine, clock);
  } else {
    auto source = std::make_shared<ReplaySource>(engine.queue(), clock);
    feed = [source](std::span<const TraceRecord> group) { source->push(group); };
  }

  ReplayResult result;
  const std::uint64_t period = engine.config().tick_period_us();
  const auto& records = trace.records;
  std::shared_ptr<const SceneSnapshot> last = engine.latest_snapshot();
  for (std::size_t i = 0; i < records.size();) {
    const std::uint64_t group = records[i].t / period;
    std::size_t j = i;
    while (j < records.size() && records[j].t / period == group) {
      ++j;
    }
    if (options.speed > 0.0 && i > 0) {
      const double gap_us = static_cast<double>(records[i].t - records[i - 1].t) / options.speed;
      std::this_thread::sleep_for(std::chrono::microseconds(static_cast<std::int64_t>(gap_us)));
    }
    feed(std::span(records).subspan(i, j - i));
    auto tick = engine.tick();
    if (options.gesture_log != nullptr) {
      write_gesture_log(*options.gesture_log, tick.stats.frame, tick.gestures);
    }
    ++result.ticks;
    result.events = tick.stats.events_in;
    result.gestures = tick.stats.gestures_out;
    last = tick.snapshot;
    i = j;
  }
  result.final_snapshot = snapshot_document(*last);
  return result;
}

namespace {

/// Grid of interactive rectangles filling the viewport.
std::unique_ptr<Scene> make_grid_scene(Viewport viewport, std::uint64_t count) {
  auto scene = std::make_unique<Scene>("bench");
  const auto cols = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  const auto rows = cols == 0 ? 0 : (count + cols - 1) / cols;
  const double cw = viewport.width / static_cast<double>(std::max<std::uint64_t>(cols, 1));
  const double ch = viewport.height / static_cast<double>(std::max<std::uint64_t>(rows, 1));
  for (std::uint64_t i = 0; i < count; ++i) {
    const double cx = (static_cast<double>(i % cols) + 0.5) * cw;
    const double cy = (static_cast<double>(i / cols) + 0.5) * ch;
    const auto id = scene->create(RectangleShape{0.8 * cw, 0.8 * ch},
                                  Affine2D::translation({cx, cy}));
    scene->add_child(scene->canvas_id(), id);
    make_interactive(*scene, id);
  }
  enable_canvas_zoom_pan(*scene);
  return scene;
}

/// Interleaved one- and two-finger touch lifecycles on random grid cells.
class SyntheticTouches {
 public:
  SyntheticTouches(Viewport viewport, std::uint64_t components, std::uint64_t seed)
      : rng_(seed), components_(std::max<std::uint64_t>(components, 1)) {
    cols_ = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(components_))));
    const auto rows = (components_ + cols_ - 1) / cols_;
    cw_ = viewport.width / static_cast<double>(cols_);
    ch_ = viewport.height / static_cast<double>(rows);
  }

  UnifiedInputEvent next() {
    while (active_.size() < kConcurrent) {
      start_touch();
    }
    std::uniform_int_distribution<std::size_t> pick(0, active_.size() - 1);
    const std::size_t k = pick(rng_);
    Touch& touch = active_[k];
    Finger& finger = touch.fingers[touch.cursor];

    UnifiedInputEvent ev;
    ev.source_id = "bench";
    ev.raw_cursor = finger.raw;
    ev.position = finger.position;
    if (touch.stage == 0) {
      ev.phase = Phase::Down;
    } else if (touch.stage <= touch.moves) {
      std::uniform_real_distribution<double> step(-1.5, 1.5);
      finger.position = finger.position + Vec2{step(rng_), step(rng_)};
      ev.phase = Phase::Move;
      ev.position = finger.position;
    } else {
      ev.phase = Phase::Up;
    }
    if (++touch.cursor == touch.fingers.size()) {
      touch.cursor = 0;
      if (++touch.stage > touch.moves + 1) {
        active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(k));
      }
    }
    return ev;
  }

 private:
  static constexpr std::size_t kConcurrent = 8;

  struct Finger {
    std::uint64_t raw = 0;
    Vec2 position;
  };
  struct Touch {
    std::vector<Finger> fingers;
    std::uint64_t moves = 0;
    std::uint64_t stage = 0;  // 0 down, 1..moves move, moves+1 up
    std::size_t cursor = 0;
  };

  void start_touch() {
    std::uniform_int_distribution<std::uint64_t> cell(0, components_ - 1);
    std::uniform_int_distribution<std::uint64_t> moves(5, 30);
    std::bernoulli_distribution two(0.5);
    const auto c = cell(rng_);
    const Vec2 center{(static_cast<double>(c % cols_) + 0.5) * cw_,
                      (static_cast<double>(c / cols_) + 0.5) * ch_};
    Touch touch;
    touch.moves = moves(rng_);
    if (two(rng_)) {
      const Vec2 offset{0.2 * cw_, 0.0};
      touch.fingers.push_back({next_raw_++, center - offset});
      touch.fingers.push_back({next_raw_++, center + offset});
    } else {
      touch.fingers.push_back({next_raw_++, center});
    }
    active_.push_back(std::move(touch));
  }

  std::mt19937_64 rng_;
  std::uint64_t components_;
  std::uint64_t cols_ = 1;
  double cw_ = 1.0;
  double ch_ = 1.0;
  std::uint64_t next_raw_ = 1;
  std::vector<Touch> active_;
};

}  // namespace

BenchReport run_bench(const BenchConfig& config) {
  if (!(config.offered_rate > 0.0) || !(config.tick_rate > 0.0)) {
    throw ConfigError("bench rates must be positive");
  }
  EngineConfig engine_config;
  engine_config.tick_rate = config.tick_rate;
  ManualClock clock;
  Engine engine(engine_config, clock);
  const Viewport viewport = engine_config.viewport;
  const std::uint64_t components = config.components;
  engine.register_scene("bench", [=] { return make_grid_scene(viewport, components); });
  engine.change_scene("bench");

  SyntheticTouches touches(viewport, config.components, config.seed);
  const Lane lane{"bench", 0};
  const std::uint64_t period = engine_config.tick_period_us();
  const auto batch = static_cast<std::uint64_t>(std::ceil(config.offered_rate / config.tick_rate));

  BenchReport report;
  std::vector<std::uint64_t> durations;
  std::chrono::steady_clock::duration busy{};
  std::uint64_t remaining = config.events;
  while (remaining > 0) {
    const std::uint64_t n = std::min(batch, remaining);
    const std::uint64_t t = report.ticks * period;
    std::vector<UnifiedInputEvent> events;
    events.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      auto ev = touches.next();
      ev.timestamp = t;
      events.push_back(std::move(ev));
    }
    clock.set(t);

    const auto start = std::chrono::steady_clock::now();
    engine.queue().push(lane, std::move(events));
    auto tick = engine.tick();
    busy += std::chrono::steady_clock::now() - start;

    durations.push_back(tick.stats.tick_duration_us);
    report.gestures = tick.stats.gestures_out;
    remaining -= n;
    ++report.ticks;
  }

  report.events = config.events;
  report.seconds = std::chrono::duration<double>(busy).count();
  report.events_per_second =
      report.seconds > 0.0 ? static_cast<double>(report.events) / report.seconds : 0.0;
  if (!durations.empty()) {
    std::sort(durations.begin(), durations.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(durations.size())));
    report.p99_tick_us = static_cast<double>(durations[std::max<std::size_t>(rank, 1) - 1]);
  }
  return report;
}

}  // namespace touchcore
