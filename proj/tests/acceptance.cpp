// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "support/e2e.hpp"
#include "support/generators.hpp"
#include "support/gesture_oracle.hpp"
#include "support/hit_oracle.hpp"
#include "support/oracles.hpp"
#include "support/tuio_checks.hpp"
#include "touchcore/osc.hpp"
#include "touchcore/trace.hpp"
#include "touchcore/tuio.hpp"

using namespace touchcore;

namespace {

namespace fs = std::filesystem;
using WallClock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit_s = 0.0;  // 0: no limit
  std::function<Outcome()> run;
};

Outcome fail(std::string detail) { return {false, std::move(detail)}; }

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out.precision(digits);
  out << v;
  return out.str();
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  const std::string command = std::string("'") + TOUCHCORE_CLI + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) {
    return -1;
  }
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    if (out != nullptr) out->append(buffer.data(), n);
  }
  const int status = pclose(pipe);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome osc_codec() {
  gen::Rng rng(20240901);
  for (int i = 0; i < 10'000; ++i) {
    const auto m = gen::osc_message(rng);
    const auto bytes = encode_osc_message(m);
    if (bytes != oracle::encode_message(m)) {
      return fail("message " + std::to_string(i) + " differs from the reference encoder");
    }
    const auto decoded = decode_osc_packet(bytes);
    if (decoded.size() != 1 || decoded[0] != m) {
      return fail("message " + std::to_string(i) + " did not round-trip");
    }
  }
  const std::string_view raw("/tuio/2Dcur\0,si\0alive\0\0\0\0\0\0\1", 28);
  const std::vector<std::uint8_t> vector(raw.begin(), raw.end());
  const OscMessage expected{"/tuio/2Dcur", {std::string("alive"), std::int32_t{1}}};
  const auto decoded = decode_osc_packet(vector);
  if (decoded.size() != 1 || decoded[0] != expected) {
    return fail("28-byte alive vector decoded incorrectly");
  }
  if (encode_osc_message(expected) != vector) {
    return fail("28-byte alive vector encoded incorrectly");
  }
  return {true, "10000 messages round-tripped, 28-byte vector exact"};
}

Outcome tuio_tracker() {
  gen::Rng rng(4242);
  std::uint64_t dropped = 0;
  std::uint64_t frames_total = 0;
  for (int s = 0; s < 1000; ++s) {
    std::vector<TuioFrame> frames;
    for (const auto& f : gen::tuio_sequence(rng, 60)) {
      frames.push_back(parse_tuio_frame(decode_osc_packet(encode_osc_bundle(tuio_frame_messages(f)))));
    }
    frames_total += frames.size();
    std::uint64_t d = 0;
    if (auto err = checks::check_tracker(frames, &d); !err.empty()) {
      return fail("sequence " + std::to_string(s) + ": " + err);
    }
    dropped += d;
  }
  if (dropped == 0) {
    return fail("no redundant frames were generated");
  }
  return {true, "1000 sequences, " + std::to_string(frames_total) + " frames, " + std::to_string(dropped) +
                    " redundant frames dropped"};
}

Outcome determinism() {
  const std::string trace = std::string(TOUCHCORE_FIXTURE_DIR) + "/determinism_1000.trace";
  const auto records = load_trace(trace).records.size();
  if (records != 1000) {
    return fail("fixture has " + std::to_string(records) + " events");
  }
  const fs::path dir = fs::temp_directory_path() / ("touchcore_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path dir;
    ~Cleanup() { fs::remove_all(dir); }
  } cleanup{dir};
  const std::vector<std::pair<std::string, std::string>> runs{{"a", ""}, {"b", ""}, {"c", " --via bridge"}};
  for (const auto& [name, via] : runs) {
    const int status = run_cli("replay '" + trace + "'" + via + " --log '" + (dir / (name + ".log")).string() +
                               "' --snapshot '" + (dir / (name + ".json")).string() + "'");
    if (status != 0) {
      return fail("replay exited with " + std::to_string(status));
    }
  }
  const auto log = slurp(dir / "a.log");
  const auto snapshot = slurp(dir / "a.json");
  if (log.empty() || snapshot.empty()) {
    return fail("replay produced no output");
  }
  if (log != slurp(dir / "b.log") || snapshot != slurp(dir / "b.json")) {
    return fail("two replays differ");
  }
  if (log != slurp(dir / "c.log") || snapshot != slurp(dir / "c.json")) {
    return fail("bridge delivery differs from direct replay");
  }
  const auto lines = static_cast<std::size_t>(std::count(log.begin(), log.end(), '\n'));
  return {true, "1000 events, " + std::to_string(lines) + " gesture records identical across 2 replays and the bridge path"};
}

Outcome rotate() {
  const auto r = e2e::two_cursor_tuio(std::numbers::pi / 2, 1.0, 64);
  const double err = std::abs(r.angle - std::numbers::pi / 2);
  const std::string detail = "angle error " + fixed(err, 3) + ", center shift " + fixed(r.center_shift, 3);
  return {err <= 1e-6 && r.center_shift < 1e-6, detail};
}

Outcome scale() {
  const auto r = e2e::two_cursor_tuio(0.0, 2.0, 64);
  const double rel = std::abs(r.factor / 2.0 - 1.0);
  return {rel <= 1e-9, "relative error " + fixed(rel, 3)};
}

Outcome gesture_oracle() {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 500; ++t) {
    const auto trace = gestures::random_pair_trace(rng);
    if (auto err = gestures::check_against_fit(trace, 1e-6); !err.empty()) {
      return fail("trace " + std::to_string(t) + ": " + err);
    }
  }
  return {true, "500 traces within 1e-6 of the similarity fit"};
}

Outcome hit_test() {
  std::mt19937_64 rng(9001);
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::size_t groups = 0;
  for (int s = 0; s < 100; ++s) {
    const auto rs = hit::random_scene(rng, 50);
    const auto report = hit::check_scene(rs, rng, 10'000);
    if (report.mismatches > 0) {
      return fail("scene " + std::to_string(s) + ": " + std::to_string(report.mismatches) +
                  " mismatches, first " + report.first_mismatch);
    }
    if (report.composite_verified != report.composite_groups) {
      return fail("scene " + std::to_string(s) + ": " +
                  std::to_string(report.composite_groups - report.composite_verified) +
                  " composite groups never exercised");
    }
    checked += report.checked;
    skipped += report.skipped;
    groups += report.composite_groups;
  }
  return {true, std::to_string(checked) + " points agree, " + std::to_string(skipped) +
                    " near boundaries skipped, " + std::to_string(groups) + " composite groups verified"};
}

Outcome throughput() {
  std::string out;
  const int status = run_cli("bench --events 100000 --components 100", &out);
  if (status != 0) {
    return fail("bench exited with " + std::to_string(status));
  }
  std::smatch rate;
  std::smatch p99;
  if (!std::regex_search(out, rate, std::regex(R"(events/sec: (\d+))")) ||
      !std::regex_search(out, p99, std::regex(R"(p99 tick us: (\d+))"))) {
    return fail("unreadable bench report");
  }
  const double events_per_second = std::stod(rate[1].str());
  const double p99_us = std::stod(p99[1].str());
  return {events_per_second >= 100'000.0 && p99_us <= 4000.0,
          rate[1].str() + " events/s, p99 tick " + p99[1].str() + " us"};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<Criterion> criteria{
      {"osc-codec", 5.0, osc_codec},
      {"tuio-tracker", 5.0, tuio_tracker},
      {"determinism", 10.0, determinism},
      {"rotate-end-to-end", 0.0, rotate},
      {"scale-end-to-end", 0.0, scale},
      {"gesture-oracle", 0.0, gesture_oracle},
      {"hit-test-oracle", 0.0, hit_test},
      {"throughput", 0.0, throughput},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = WallClock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(WallClock::now() - start).count();
    if (outcome.pass && c.time_limit_s > 0.0 && seconds >= c.time_limit_s) {
      outcome = fail(outcome.detail + "; over the " + fixed(c.time_limit_s, 3) + " s limit");
    }
    failures += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << c.name << ": " << outcome.detail << " ("
              << fixed(seconds, 3) << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
