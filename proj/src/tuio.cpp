#include "touchcore/tuio.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

namespace touchcore {
namespace {

const std::string* command_of(const OscMessage& msg) {
  if (msg.args.empty()) {
    return nullptr;
  }
  return std::get_if<std::string>(&msg.args.front());
}

float clamp_unit(float v, TuioParseStats* stats) {
  if (v < 0.0F || v > 1.0F) {
    if (stats != nullptr) {
      ++stats->clamped_coordinates;
    }
    return std::clamp(v, 0.0F, 1.0F);
  }
  return v;
}

TuioCursorRecord parse_set(const OscMessage& msg, TuioParseStats* stats) {
  if (msg.args.size() != 7 || !std::holds_alternative<std::int32_t>(msg.args[1])) {
    throw TuioError(TuioErrc::MalformedSet, "2Dcur set expects (s x y X Y m) as (i f f f f f)");
  }
  float values[5];
  for (std::size_t i = 0; i < 5; ++i) {
    const auto* f = std::get_if<float>(&msg.args[i + 2]);
    if (f == nullptr || !std::isfinite(*f)) {
      throw TuioError(TuioErrc::MalformedSet, "2Dcur set field is not a finite float");
    }
    values[i] = *f;
  }
  TuioCursorRecord rec;
  rec.session_id = std::get<std::int32_t>(msg.args[1]);
  rec.x = clamp_unit(values[0], stats);
  rec.y = clamp_unit(values[1], stats);
  rec.vx = values[2];
  rec.vy = values[3];
  rec.accel = values[4];
  return rec;
}

}  // namespace

bool has_tuio_cursor_messages(std::span<const OscMessage> msgs) {
  return std::any_of(msgs.begin(), msgs.end(),
                     [](const OscMessage& m) { return m.address == kTuioCursorAddress; });
}

TuioFrame parse_tuio_frame(std::span<const OscMessage> msgs, TuioParseStats* stats) {
  std::optional<std::vector<std::int32_t>> alive;
  std::optional<std::int32_t> fseq;
  std::vector<TuioCursorRecord> sets;
  TuioParseStats local;
  TuioParseStats* st = stats != nullptr ? stats : &local;

  for (const auto& msg : msgs) {
    const std::string* cmd = msg.address == kTuioCursorAddress ? command_of(msg) : nullptr;
    if (cmd == nullptr) {
      ++st->ignored_messages;
    } else if (*cmd == "alive") {
      if (alive) {
        throw TuioError(TuioErrc::MalformedAlive, "duplicate 2Dcur alive message");
      }
      alive.emplace();
      for (std::size_t i = 1; i < msg.args.size(); ++i) {
        const auto* id = std::get_if<std::int32_t>(&msg.args[i]);
        if (id == nullptr) {
          throw TuioError(TuioErrc::MalformedAlive, "2Dcur alive arguments must be int32");
        }
        if (std::find(alive->begin(), alive->end(), *id) == alive->end()) {
          alive->push_back(*id);
        }
      }
    } else if (*cmd == "set") {
      sets.push_back(parse_set(msg, st));
    } else if (*cmd == "fseq") {
      const std::int32_t* v =
          msg.args.size() == 2 ? std::get_if<std::int32_t>(&msg.args[1]) : nullptr;
      if (v == nullptr || fseq) {
        throw TuioError(TuioErrc::MalformedFseq, "2Dcur fseq expects exactly one int32");
      }
      fseq = *v;
    } else {
      ++st->ignored_messages;
    }
  }

  if (!alive) {
    throw TuioError(TuioErrc::MissingAlive, "2Dcur frame has no alive message");
  }
  if (!fseq) {
    throw TuioError(TuioErrc::MissingFseq, "2Dcur frame has no fseq message");
  }

  TuioFrame frame;
  frame.fseq = *fseq;
  frame.alive = std::move(*alive);
  const std::set<std::int32_t> members(frame.alive.begin(), frame.alive.end());
  for (auto& rec : sets) {
    if (members.count(rec.session_id) != 0) {
      frame.sets.push_back(rec);
    } else {
      ++st->orphan_sets;
    }
  }
  return frame;
}

std::vector<OscMessage> tuio_frame_messages(const TuioFrame& frame) {
  const std::string addr(kTuioCursorAddress);
  std::vector<OscMessage> out;
  OscMessage alive{addr, {std::string("alive")}};
  for (auto id : frame.alive) {
    alive.args.emplace_back(id);
  }
  out.push_back(std::move(alive));
  for (const auto& s : frame.sets) {
    out.push_back(OscMessage{addr, {std::string("set"), s.session_id, s.x, s.y, s.vx, s.vy, s.accel}});
  }
  out.push_back(OscMessage{addr, {std::string("fseq"), frame.fseq}});
  return out;
}

std::vector<CursorTransition> track_tuio(const TuioFrame& frame, TuioTrackerState& state) {
  if (frame.fseq != -1) {
    const std::int64_t behind = std::int64_t{state.last_fseq} - frame.fseq;
    if (behind >= 0 && behind < kFseqRestartWindow) {
      ++state.dropped_frames;
      return {};
    }
    state.last_fseq = frame.fseq;
  }

  std::map<std::int32_t, TuioCursorRecord> records;
  for (const auto& rec : frame.sets) {
    records[rec.session_id] = rec;
  }
  const std::set<std::int32_t> alive(frame.alive.begin(), frame.alive.end());

  std::vector<CursorTransition> deaths;
  std::vector<CursorTransition> births;
  std::vector<CursorTransition> updates;

  for (auto it = state.live.begin(); it != state.live.end();) {
    if (alive.count(it->first) == 0) {
      deaths.push_back({TransitionKind::Death, it->first, it->second.x, it->second.y});
      it = state.live.erase(it);
    } else {
      ++it;
    }
  }

  for (auto id : frame.alive) {
    const auto rec = records.find(id);
    const auto known = state.live.find(id);
    if (known == state.live.end()) {
      // Alive but never positioned: defer the birth until the first set record.
      if (rec != records.end()) {
        births.push_back({TransitionKind::Birth, id, rec->second.x, rec->second.y});
        state.live.emplace(id, rec->second);
      }
    } else if (rec != records.end()) {
      if (rec->second.x != known->second.x || rec->second.y != known->second.y) {
        updates.push_back({TransitionKind::Update, id, rec->second.x, rec->second.y});
      }
      known->second = rec->second;
    }
  }

  std::vector<CursorTransition> out;
  out.reserve(deaths.size() + births.size() + updates.size());
  out.insert(out.end(), deaths.begin(), deaths.end());
  out.insert(out.end(), births.begin(), births.end());
  out.insert(out.end(), updates.begin(), updates.end());
  return out;
}

}  // namespace touchcore
