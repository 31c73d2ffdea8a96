#include "touchcore/trace.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "touchcore/text.hpp"

namespace touchcore {
namespace {

using ojson = nlohmann::ordered_json;

void append_json_string(std::string& out, const std::string& s) { out += ojson(s).dump(); }

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw TraceError(TraceErrc::MalformedTrace, line, why);
}

template <std::size_t N>
void expect_keys(const ojson& obj, const std::array<std::string_view, N>& keys, std::size_t line) {
  if (!obj.is_object() || obj.size() != N) {
    malformed(line, "expected an object with " + std::to_string(N) + " fields");
  }
  std::size_t i = 0;
  for (const auto& item : obj.items()) {
    if (item.key() != keys[i++]) {
      malformed(line, "unexpected field '" + item.key() + "'");
    }
  }
}

double finite_number(const ojson& v, std::size_t line, const char* field) {
  if (!v.is_number()) {
    malformed(line, std::string(field) + " must be a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    malformed(line, std::string(field) + " must be finite");
  }
  return d;
}

TraceHeader parse_header(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::exception& e) {
    malformed(1, e.what());
  }
  expect_keys(doc, std::array<std::string_view, 2>{"format", "viewport"}, 1);
  if (doc["format"] != std::string(kTraceFormat)) {
    malformed(1, "unsupported trace format");
  }
  const auto& vp = doc["viewport"];
  expect_keys(vp, std::array<std::string_view, 2>{"width", "height"}, 1);
  TraceHeader header;
  header.viewport = {finite_number(vp["width"], 1, "width"), finite_number(vp["height"], 1, "height")};
  if (!(header.viewport.width > 0.0) || !(header.viewport.height > 0.0)) {
    malformed(1, "viewport must be positive");
  }
  return header;
}

TraceRecord parse_record(const std::string& text, std::size_t line) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::exception& e) {
    malformed(line, e.what());
  }
  expect_keys(doc, std::array<std::string_view, 6>{"t", "src", "cur", "phase", "x", "y"}, line);
  TraceRecord rec;
  if (!doc["t"].is_number_unsigned() || !doc["cur"].is_number_unsigned()) {
    malformed(line, "t and cur must be unsigned integers");
  }
  rec.t = doc["t"].get<std::uint64_t>();
  rec.cur = doc["cur"].get<std::uint64_t>();
  if (!doc["src"].is_string() || doc["src"].get_ref<const std::string&>().empty()) {
    malformed(line, "src must be a non-empty string");
  }
  rec.src = doc["src"].get<std::string>();
  const auto phase =
      doc["phase"].is_string() ? parse_phase(doc["phase"].get<std::string>()) : std::nullopt;
  if (!phase) {
    malformed(line, "phase must be one of down/move/up/cancel");
  }
  rec.phase = *phase;
  rec.x = finite_number(doc["x"], line, "x");
  rec.y = finite_number(doc["y"], line, "y");
  return rec;
}

}  // namespace

std::string format_trace_header(const TraceHeader& header) {
  std::string out = "{\"format\":";
  append_json_string(out, std::string(kTraceFormat));
  out += ",\"viewport\":{\"width\":";
  append_double(out, header.viewport.width);
  out += ",\"height\":";
  append_double(out, header.viewport.height);
  out += "}}";
  return out;
}

std::string format_trace_record(const TraceRecord& r) {
  std::string out = "{\"t\":";
  append_uint(out, r.t);
  out += ",\"src\":";
  append_json_string(out, r.src);
  out += ",\"cur\":";
  append_uint(out, r.cur);
  out += ",\"phase\":\"";
  out += to_string(r.phase);
  out += "\",\"x\":";
  append_double(out, r.x);
  out += ",\"y\":";
  append_double(out, r.y);
  out += '}';
  return out;
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << format_trace_header(trace.header) << '\n';
  for (const auto& r : trace.records) {
    out << format_trace_record(r) << '\n';
  }
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string text;
  if (!std::getline(in, text)) {
    malformed(1, "missing header");
  }
  trace.header = parse_header(text);
  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    auto rec = parse_record(text, line);
    if (!trace.records.empty() && rec.t < trace.records.back().t) {
      throw TraceError(TraceErrc::NonMonotonic, line, "timestamp decreases");
    }
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_trace(out, trace);
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  return read_trace(in);
}

TraceRecord to_trace_record(const UnifiedInputEvent& ev) {
  return TraceRecord{ev.timestamp, ev.source_id, ev.raw_cursor, ev.phase, ev.position.x,
                     ev.position.y};
}

std::vector<UnifiedInputEvent> replay_events(const Trace& trace) {
  std::vector<UnifiedInputEvent> out;
  out.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    UnifiedInputEvent ev;
    ev.source_id = r.src;
    ev.raw_cursor = r.cur;
    ev.phase = r.phase;
    ev.position = {r.x, r.y};
    ev.timestamp = r.t;
    out.push_back(std::move(ev));
  }
  return out;
}

TraceRecorder::TraceRecorder(std::ostream& out, const TraceHeader& header) : out_(&out) {
  *out_ << format_trace_header(header) << '\n';
}

void TraceRecorder::record(std::span<const UnifiedInputEvent> events) {
  for (const auto& ev : events) {
    // The queue stamps under its lock, so drained timestamps never go backwards.
    last_t_ = std::max(last_t_, ev.timestamp);
    auto rec = to_trace_record(ev);
    rec.t = last_t_;
    *out_ << format_trace_record(rec) << '\n';
    ++written_;
  }
  out_->flush();
}

void ReplaySource::push(std::span<const TraceRecord> records) {
  Trace slice;
  slice.records.assign(records.begin(), records.end());
  queue().push(lane(), replay_events(slice));
}

}  // namespace touchcore
