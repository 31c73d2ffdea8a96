#include "touchcore/bridge.hpp"

#include <cmath>
#include <memory>

#include <nlohmann/json.hpp>

#include "touchcore/text.hpp"

namespace touchcore {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void malformed(const std::string& why) {
  throw BridgeError(BridgeErrc::MalformedClientMessage, why);
}

const json& member(const json& object, const char* key) {
  const auto it = object.find(key);
  if (it == object.end()) {
    malformed(std::string("missing \"") + key + "\"");
  }
  return *it;
}

double finite_number(const json& object, const char* key) {
  const json& v = member(object, key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    malformed(std::string("\"") + key + "\" must be a finite number");
  }
  return v.get<double>();
}

InputMessage parse_input(const json& doc) {
  const json& cursors = member(doc, "cursors");
  if (!cursors.is_array()) {
    malformed("\"cursors\" must be an array");
  }
  InputMessage message;
  for (const auto& c : cursors) {
    if (!c.is_object()) {
      malformed("cursor entries must be objects");
    }
    const json& id = member(c, "id");
    if (!id.is_number_unsigned() && !(id.is_number_integer() && id.get<std::int64_t>() >= 0)) {
      malformed("cursor \"id\" must be a non-negative integer");
    }
    const json& phase = member(c, "phase");
    const auto parsed = phase.is_string() ? parse_phase(phase.get<std::string>()) : std::nullopt;
    if (!parsed) {
      malformed("cursor \"phase\" must be down, move, up or cancel");
    }
    message.cursors.push_back(
        {id.get<std::uint64_t>(), *parsed, {finite_number(c, "x"), finite_number(c, "y")}});
  }
  return message;
}

EngineCommand parse_command(const json& doc) {
  const json& name = member(doc, "name");
  if (!name.is_string()) {
    malformed("\"name\" must be a string");
  }
  EngineCommand command;
  if (name == "reset") {
    command.kind = EngineCommand::Kind::Reset;
    return command;
  }
  if (name != "change_scene") {
    malformed("unknown command '" + name.get<std::string>() + "'");
  }
  const json& args = member(doc, "args");
  if (!args.is_object()) {
    malformed("\"args\" must be an object");
  }
  const json& scene = member(args, "scene");
  if (!scene.is_string()) {
    malformed("\"scene\" must be a string");
  }
  command.kind = EngineCommand::Kind::ChangeScene;
  command.scene = scene.get<std::string>();
  return command;
}

/// `{"type":"<type>",` followed by the members of a serialized object.
std::string with_type(std::string_view type, const std::string& object) {
  std::string out;
  out.reserve(object.size() + type.size() + 12);
  out += R"({"type":")";
  out += type;
  out += '"';
  if (object.size() > 2) {
    out += ',';
  }
  out.append(object, 1);
  return out;
}

}  // namespace

std::string_view to_string(BridgeErrc code) {
  switch (code) {
    case BridgeErrc::MalformedClientMessage:
      return "MalformedClientMessage";
    case BridgeErrc::PortInUse:
      return "PortInUse";
  }
  return "?";
}

ClientMessage parse_client_message(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    malformed("message must be a JSON object");
  }
  const auto type = doc.find("type");
  if (type == doc.end()) {
    if (doc.contains("cursors")) {
      return parse_input(doc);
    }
    malformed("missing \"type\"");
  }
  if (*type == "input") {
    return parse_input(doc);
  }
  if (*type == "command") {
    return parse_command(doc);
  }
  malformed("unknown message type");
}

std::string format_input_message(const InputMessage& message) {
  std::string out = R"({"type":"input","cursors":[)";
  bool first = true;
  for (const auto& c : message.cursors) {
    if (!first) {
      out += ',';
    }
    first = false;
    out += R"({"id":)";
    append_uint(out, c.id);
    out += R"(,"phase":")";
    out += to_string(c.phase);
    out += R"(","x":)";
    append_double(out, c.position.x);
    out += R"(,"y":)";
    append_double(out, c.position.y);
    out += '}';
  }
  out += "]}";
  return out;
}

std::string format_command_message(const EngineCommand& command) {
  ojson doc;
  doc["type"] = "command";
  if (command.kind == EngineCommand::Kind::Reset) {
    doc["name"] = "reset";
  } else {
    doc["name"] = "change_scene";
    doc["args"] = {{"scene", command.scene}};
  }
  return doc.dump();
}

std::string format_hello_message(std::span<const std::string> scenes, Viewport viewport) {
  ojson doc;
  doc["type"] = "hello";
  doc["protocol"] = kBridgeProtocol;
  doc["scenes"] = std::vector<std::string>(scenes.begin(), scenes.end());
  doc["viewport"] = {{"width", viewport.width}, {"height", viewport.height}};
  return doc.dump();
}

std::string format_snapshot_message(const SceneSnapshot& snapshot) {
  return with_type("snapshot", snapshot_document(snapshot));
}

std::string format_gesture_message(std::uint64_t frame, const GestureEvent& gesture) {
  return with_type("gesture", format_gesture_record(frame, gesture));
}

std::string format_stats_message(const FrameStats& stats) {
  ojson doc;
  doc["type"] = "stats";
  doc["frame"] = stats.frame;
  doc["eventsIn"] = stats.events_in;
  doc["gesturesOut"] = stats.gestures_out;
  doc["tickDurationUs"] = stats.tick_duration_us;
  doc["droppedTuioFrames"] = stats.dropped_tuio_frames;
  doc["droppedEvents"] = stats.dropped_events;
  doc["listenerFailures"] = stats.listener_failures;
  return doc.dump();
}

std::string format_error_message(std::string_view code, std::string_view message) {
  ojson doc;
  doc["type"] = "error";
  doc["code"] = code;
  doc["message"] = message;
  return doc.dump();
}

void BridgeInputSource::handle(const InputMessage& message) {
  std::vector<UnifiedInputEvent> events;
  events.reserve(message.cursors.size());
  for (const auto& c : message.cursors) {
    UnifiedInputEvent ev;
    ev.source_id = source_id();
    ev.raw_cursor = c.id;
    ev.phase = c.phase;
    ev.position = c.position;
    events.push_back(std::move(ev));
    if (c.phase == Phase::Up || c.phase == Phase::Cancel) {
      live_.erase(c.id);
    } else {
      live_[c.id] = c.position;
    }
  }
  emit(std::move(events));
}

void BridgeInputSource::shutdown() {
  InputMessage cancel;
  for (const auto& [id, position] : live_) {
    cancel.cursors.push_back({id, Phase::Cancel, position});
  }
  handle(cancel);
}

ReplayInput bridge_replay_input() {
  return [](Engine& engine, ManualClock& clock) -> ReplayFeed {
    struct State {
      State(InputQueue& queue, Clock& clock) : source(queue, clock, "bridge") {}
      BridgeInputSource source;
      std::map<std::pair<std::string, std::uint64_t>, std::uint64_t> ids;
      std::uint64_t next_id = 1;
    };
    auto state = std::make_shared<State>(engine.queue(), clock);
    return [state, &clock](std::span<const TraceRecord> group) {
      for (const auto& r : group) {
        auto [it, fresh] = state->ids.try_emplace({r.src, r.cur}, state->next_id);
        if (fresh) {
          ++state->next_id;
        }
        const InputMessage input{{{it->second, r.phase, {r.x, r.y}}}};
        clock.set(r.t);
        const auto parsed = parse_client_message(format_input_message(input));
        state->source.handle(std::get<InputMessage>(parsed));
      }
    };
  };
}

}  // namespace touchcore
