#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "touchcore/input.hpp"

namespace touchcore {

inline constexpr std::string_view kTraceFormat = "touchcore-trace/1";

struct TraceHeader {
  Viewport viewport;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct TraceRecord {
  std::uint64_t t = 0;  // microseconds
  std::string src;
  std::uint64_t cur = 0;  // raw cursor id within `src`
  Phase phase = Phase::Down;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceRecord> records;

  friend bool operator==(const Trace&, const Trace&) = default;
};

enum class TraceErrc { MalformedTrace, NonMonotonic };

class TraceError : public std::runtime_error {
 public:
  TraceError(TraceErrc code, std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), code_(code), line_(line) {}
  TraceErrc code() const noexcept { return code_; }
  /// 1-based line in the file; the header is line 1.
  std::size_t line() const noexcept { return line_; }

 private:
  TraceErrc code_;
  std::size_t line_;
};

// Line format (one JSON object per line, keys in this exact order):
//   {"format":"touchcore-trace/1","viewport":{"width":800,"height":600}}
//   {"t":10,"src":"tuio","cur":1,"phase":"down","x":200,"y":450}
// Numbers use the shortest decimal form that round-trips.
std::string format_trace_header(const TraceHeader& header);
std::string format_trace_record(const TraceRecord& record);

void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in);
void save_trace(const std::filesystem::path& path, const Trace& trace);
Trace load_trace(const std::filesystem::path& path);

TraceRecord to_trace_record(const UnifiedInputEvent& ev);

/// Events carrying exactly the recorded fields, in file order. Engine ids are
/// left for the queue to assign.
std::vector<UnifiedInputEvent> replay_events(const Trace& trace);

/// Streams drained events to a trace file as they happen.
class TraceRecorder {
 public:
  TraceRecorder(std::ostream& out, const TraceHeader& header);

  void record(std::span<const UnifiedInputEvent> events);
  std::uint64_t records_written() const { return written_; }

 private:
  std::ostream* out_;
  std::uint64_t last_t_ = 0;
  std::uint64_t written_ = 0;
};

/// Pushes recorded events with their recorded timestamps (virtual time).
/// Everything travels on one lane, so file order is preserved exactly.
class ReplaySource final : public InputSource {
 public:
  ReplaySource(InputQueue& queue, Clock& clock, std::string lane = "replay")
      : InputSource(std::move(lane), 0, queue, clock) {}

  void push(std::span<const TraceRecord> records);
};

}  // namespace touchcore
