#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "touchcore/bridge.hpp"
#include "touchcore/engine.hpp"
#include "touchcore/server.hpp"
#include "touchcore/trace.hpp"

namespace {

using namespace touchcore;

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("touchcore");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("TOUCHCORE_LOG")) {
    const std::string name = env;
    const auto level = spdlog::level::from_str(name);
    if (level == spdlog::level::off && name != "off") {
      spdlog::warn("ignoring unknown TOUCHCORE_LOG level '{}'", name);
    } else {
      spdlog::set_level(level);
    }
  }
}

Viewport parse_viewport(const std::string& text) {
  static const std::regex pattern(R"(^([0-9]+(?:\.[0-9]+)?)x([0-9]+(?:\.[0-9]+)?)$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) {
    throw ConfigError("viewport must look like WIDTHxHEIGHT, got '" + text + "'");
  }
  return {std::stod(m[1].str()), std::stod(m[2].str())};
}

struct ServeFlags {
  EngineConfig config;
  std::string viewport = "1024x768";
  double tap_time_ms = 350.0;
  std::string log_path;
};

void add_engine_flags(CLI::App& cmd, ServeFlags& flags) {
  cmd.add_option("--viewport", flags.viewport, "Scene size in units, WIDTHxHEIGHT")
      ->capture_default_str();
  cmd.add_option("--tick-rate", flags.config.tick_rate, "Ticks per second")->capture_default_str();
  cmd.add_option("--scene", flags.config.scene, "Initial scene")->capture_default_str();
  cmd.add_option("--tap-time", flags.tap_time_ms, "Longest tap, milliseconds")
      ->capture_default_str();
  cmd.add_option("--tap-distance", flags.config.tap.max_distance, "Largest tap travel")
      ->capture_default_str();
}

void add_serve_flags(CLI::App& cmd, ServeFlags& flags) {
  cmd.add_option("--tuio-port", flags.config.tuio_port, "UDP port for TUIO")
      ->capture_default_str();
  cmd.add_option("--bridge-port", flags.config.bridge_port, "TCP port for the websocket bridge")
      ->capture_default_str();
  cmd.add_option("--log", flags.log_path, "Write the gesture log to FILE");
  add_engine_flags(cmd, flags);
}

EngineConfig finish_config(ServeFlags& flags) {
  flags.config.viewport = parse_viewport(flags.viewport);
  if (!(flags.tap_time_ms >= 0.0)) {
    throw ConfigError("tap time must not be negative");
  }
  flags.config.tap.max_time_us = static_cast<std::uint64_t>(flags.tap_time_ms * 1000.0);
  flags.config.validate();
  return flags.config;
}

std::optional<std::ofstream> open_output(const std::string& path) {
  if (path.empty()) {
    return std::nullopt;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  return out;
}

int serve(ServeFlags& flags, const std::string& trace_path) {
  const EngineConfig config = finish_config(flags);
  auto trace = open_output(trace_path);
  auto log = open_output(flags.log_path);
  ServeOptions options;
  options.trace_out = trace ? &*trace : nullptr;
  options.gesture_log = log ? &*log : nullptr;
  options.handle_signals = true;
  Server server(config, options);
  server.run();
  return 0;
}

int replay(ServeFlags& flags, const std::string& path, double speed, const std::string& via,
           const std::string& snapshot_path) {
  EngineConfig config = flags.config;
  config.tap.max_time_us = static_cast<std::uint64_t>(flags.tap_time_ms * 1000.0);
  config.validate();
  if (!(speed >= 0.0)) {
    throw ConfigError("speed must not be negative");
  }
  const Trace trace = load_trace(path);
  auto log = open_output(flags.log_path);
  ReplayOptions options;
  options.speed = speed;
  options.gesture_log = log ? &*log : nullptr;
  const auto result =
      replay_trace(trace, config, options, via == "bridge" ? bridge_replay_input() : ReplayInput{});
  if (auto snapshot = open_output(snapshot_path)) {
    *snapshot << result.final_snapshot << '\n';
  }
  spdlog::info("replayed {} events in {} ticks, {} gestures", result.events, result.ticks,
               result.gestures);
  return 0;
}

int bench(const BenchConfig& config) {
  const auto report = run_bench(config);
  std::cout << "events: " << report.events << '\n'
            << "components: " << config.components << '\n'
            << "ticks: " << report.ticks << '\n'
            << "gestures: " << report.gestures << '\n'
            << "events/sec: " << static_cast<std::uint64_t>(report.events_per_second) << '\n'
            << "p99 tick us: " << static_cast<std::uint64_t>(report.p99_tick_us) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Multi-touch input and gesture engine"};
  app.set_version_flag("--version", std::string("touchcore ") + std::string(kVersion));
  app.require_subcommand(1);

  ServeFlags serve_flags;
  auto* serve_cmd = app.add_subcommand("serve", "Run the engine with TUIO and bridge listeners");
  add_serve_flags(*serve_cmd, serve_flags);

  ServeFlags record_flags;
  std::string record_out;
  auto* record_cmd = app.add_subcommand("record", "Serve and write every input event to a trace");
  record_cmd->add_option("--out", record_out, "Trace file")->required();
  add_serve_flags(*record_cmd, record_flags);

  ServeFlags replay_flags;
  std::string replay_path;
  std::string snapshot_path;
  std::string via = "replay";
  double speed = 0.0;
  auto* replay_cmd = app.add_subcommand("replay", "Run a trace headless on virtual time");
  replay_cmd->add_option("file", replay_path, "Trace file")->required();
  replay_cmd->add_option("--speed", speed, "Pace ticks at k times recorded speed; 0 = unpaced")
      ->capture_default_str();
  replay_cmd->add_option("--log", replay_flags.log_path, "Write the gesture log to FILE");
  replay_cmd->add_option("--snapshot", snapshot_path, "Write the final scene document to FILE");
  replay_cmd->add_option("--via", via, "Delivery path for the records")
      ->check(CLI::IsMember({"replay", "bridge"}))
      ->capture_default_str();
  replay_cmd->add_option("--tick-rate", replay_flags.config.tick_rate, "Ticks per second")
      ->capture_default_str();
  replay_cmd->add_option("--scene", replay_flags.config.scene, "Scene")->capture_default_str();

  BenchConfig bench_config;
  auto* bench_cmd = app.add_subcommand("bench", "Synthetic load through the full pipeline");
  bench_cmd->add_option("--events", bench_config.events, "Events to process")
      ->capture_default_str();
  bench_cmd->add_option("--components", bench_config.components, "Interactive rectangles")
      ->capture_default_str();
  bench_cmd->add_option("--rate", bench_config.offered_rate, "Offered events per second")
      ->capture_default_str();
  bench_cmd->add_option("--tick-rate", bench_config.tick_rate, "Ticks per second")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_config.seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (*serve_cmd) {
      return serve(serve_flags, "");
    }
    if (*record_cmd) {
      return serve(record_flags, record_out);
    }
    if (*replay_cmd) {
      return replay(replay_flags, replay_path, speed, via, snapshot_path);
    }
    return bench(bench_config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  } catch (const SceneError& e) {
    if (e.code() == SceneErrc::UnknownScene) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsageError;
    }
    spdlog::error("{}", e.what());
    return kRuntimeError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntimeError;
  }
}
