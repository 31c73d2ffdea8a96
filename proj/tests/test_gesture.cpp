#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "support/gesture_oracle.hpp"
#include "touchcore/gesture.hpp"

using namespace touchcore;
using gestures::touch;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<GestureEvent> run(GestureProcessor& p, const std::vector<UnifiedInputEvent>& events) {
  std::vector<GestureEvent> out;
  for (const auto& ev : events) {
    p.process(ev, *ev.target, out);
  }
  return out;
}

std::vector<GesturePhase> phases(const std::vector<GestureEvent>& events) {
  std::vector<GesturePhase> out;
  for (const auto& g : events) {
    out.push_back(g.phase);
  }
  return out;
}

using enum GesturePhase;

}  // namespace

TEST(RotateStep, QuarterTurn) {
  const auto s = rotate_step({0, 0}, {0, 0}, {2, 0}, {0, 2});
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->angle, kPi / 2);
  EXPECT_EQ(s->pivot, (Vec2{0, 1}));
}

TEST(RotateStep, NoMotionIsZero) {
  const auto s = rotate_step({1, 2}, {1, 2}, {5, 7}, {5, 7});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->angle, 0.0);
}

TEST(RotateStep, DegenerateSpan) {
  EXPECT_FALSE(rotate_step({0, 0}, {0, 0}, {1e-9, 0}, {1, 0}));
  EXPECT_FALSE(rotate_step({0, 0}, {0, 0}, {1, 0}, {1e-9, 0}));
}

TEST(RotateStep, HalfTurnIsPositivePi) {
  const auto s = rotate_step({0, 0}, {0, 0}, {1, 0}, {-1, 0});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->angle, kPi);
  const auto t = rotate_step({0, 0}, {0, 0}, {1, 0}, {-1, -0.0});
  ASSERT_TRUE(t);
  EXPECT_EQ(t->angle, kPi);
}

TEST(RotateStep, TranslationInvarianceIsExactOnDyadicGrid) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> coord(-4096, 4096);
  auto dyadic = [&] { return Vec2{coord(rng) / 64.0, coord(rng) / 64.0}; };
  for (int i = 0; i < 5000; ++i) {
    const Vec2 p1 = dyadic(), q1 = dyadic(), p2 = dyadic(), q2 = dyadic();
    const Vec2 t{coord(rng) / 16.0, coord(rng) / 16.0};
    const auto a = rotate_step(p1, q1, p2, q2);
    const auto b = rotate_step(p1 + t, q1 + t, p2 + t, q2 + t);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      ASSERT_EQ(a->angle, b->angle);
    }
  }
}

TEST(RotateStep, TranslationInvarianceOnRandomReals) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> coord(-1000, 1000);
  auto point = [&] { return Vec2{coord(rng), coord(rng)}; };
  for (int i = 0; i < 5000; ++i) {
    const Vec2 p1 = point(), q1 = point(), p2 = point(), q2 = point(), t = point();
    const auto a = rotate_step(p1, q1, p2, q2);
    const auto b = rotate_step(p1 + t, q1 + t, p2 + t, q2 + t);
    ASSERT_TRUE(a && b);
    ASSERT_NEAR(oracle::angle_difference(a->angle, b->angle), 0.0, 1e-12);
  }
}

TEST(ScaleStep, Doubling) {
  const auto s = scale_step({0, 0}, {-1, 0}, {2, 0}, {3, 0});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->factor, 2.0);
  EXPECT_EQ(s->pivot, (Vec2{1, 0}));
}

TEST(ScaleStep, NoMotionIsOne) {
  const auto s = scale_step({3, 4}, {3, 4}, {6, 8}, {6, 8});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->factor, 1.0);
}

TEST(ScaleStep, CollapsingSpanIsDegenerate) {
  EXPECT_FALSE(scale_step({0, 0}, {0, 0}, {2, 0}, {1e-7, 0}));
  EXPECT_FALSE(scale_step({0, 0}, {0, 0}, {0, 0}, {2, 0}));
}

TEST(ScaleStep, RigidMotionInvariance) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> coord(-500, 500);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  auto point = [&] { return Vec2{coord(rng), coord(rng)}; };
  for (int i = 0; i < 5000; ++i) {
    const Vec2 p1 = point(), q1 = point(), p2 = point(), q2 = point(), t = point();
    const double c = std::cos(angle(rng));
    const double s = std::sqrt(1 - c * c);
    auto rigid = [&](Vec2 v) { return Vec2{c * v.x - s * v.y + t.x, s * v.x + c * v.y + t.y}; };
    const auto a = scale_step(p1, q1, p2, q2);
    const auto b = scale_step(rigid(p1), rigid(q1), rigid(p2), rigid(q2));
    ASSERT_TRUE(a && b);
    ASSERT_NEAR(a->factor, b->factor, 1e-12 * a->factor);
  }
}

TEST(StepComposition, RigidArcsMatchClosedFormTotals) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> coord(100, 900);
  std::uniform_real_distribution<double> total_angle(-3 * kPi, 3 * kPi);
  std::uniform_real_distribution<double> log_ratio(-2, 2);
  std::uniform_int_distribution<int> steps(8, 400);
  for (int i = 0; i < 500; ++i) {
    const Vec2 center{coord(rng), coord(rng)};
    const double r0 = 20 + coord(rng) / 10;
    const double theta = total_angle(rng);
    const double ratio = std::exp(log_ratio(rng));
    const double phi0 = total_angle(rng);
    const int n = steps(rng);
    auto at = [&](int k, double offset) {
      const double f = static_cast<double>(k) / n;
      const double r = r0 * std::pow(ratio, f);
      const double phi = phi0 + theta * f + offset;
      return center + Vec2{r * std::cos(phi), r * std::sin(phi)};
    };
    double angle = 0;
    double factor = 1;
    for (int k = 0; k < n; ++k) {
      const auto rs = rotate_step(at(k, 0), at(k + 1, 0), at(k, kPi), at(k + 1, kPi));
      const auto ss = scale_step(at(k, 0), at(k + 1, 0), at(k, kPi), at(k + 1, kPi));
      ASSERT_TRUE(rs && ss);
      angle += rs->angle;
      factor *= ss->factor;
    }
    ASSERT_NEAR(angle, theta, 1e-9 * n);
    ASSERT_NEAR(factor / ratio, 1.0, 1e-9 * n);
  }
}

TEST(DragStep, Examples) {
  const Vec2 one[] = {{15, 12}};
  EXPECT_EQ(drag_step(one, {10, 10}), (Vec2{5, 2}));
  const Vec2 two[] = {{4, 0}, {10, 0}};
  EXPECT_EQ(drag_step(two, centroid(std::vector<Vec2>{{0, 0}, {10, 0}})), (Vec2{2, 0}));
  EXPECT_EQ(drag_step(one, {15, 12}), (Vec2{0, 0}));
}

TEST(TapDetect, Examples) {
  const std::vector<CursorSample> quick{{Phase::Down, {10, 10}, 0},
                                        {Phase::Move, {12, 11}, 100'000},
                                        {Phase::Up, {13, 10}, 200'000}};
  const auto tap = tap_detect(quick);
  ASSERT_TRUE(tap);
  EXPECT_EQ(*tap, (Vec2{10, 10}));

  const std::vector<CursorSample> slow{{Phase::Down, {10, 10}, 0}, {Phase::Up, {10, 10}, 500'000}};
  EXPECT_FALSE(tap_detect(slow));

  const std::vector<CursorSample> far{{Phase::Down, {10, 10}, 0},
                                      {Phase::Move, {50, 10}, 50'000},
                                      {Phase::Up, {10, 10}, 100'000}};
  EXPECT_FALSE(tap_detect(far));

  const std::vector<CursorSample> cancelled{{Phase::Down, {10, 10}, 0},
                                            {Phase::Cancel, {10, 10}, 1}};
  EXPECT_FALSE(tap_detect(cancelled));

  const std::vector<CursorSample> bounds{{Phase::Down, {0, 0}, 0}, {Phase::Up, {12, 0}, 350'000}};
  EXPECT_TRUE(tap_detect(bounds));
  EXPECT_FALSE(tap_detect(bounds, {349'999, 12}));
}

TEST(DragProcessor, PressDragRelease) {
  DragProcessor drag;
  const auto out = run(drag, {touch(1, Phase::Down, {10, 10}), touch(1, Phase::Move, {15, 12}),
                              touch(1, Phase::Move, {15, 12}), touch(1, Phase::Up, {15, 12})});
  EXPECT_EQ(phases(out), (std::vector{Started, Updated, Updated, Ended}));
  EXPECT_EQ(out[1].translation, (Vec2{5, 2}));
  EXPECT_EQ(out[2].translation, (Vec2{0, 0}));
  EXPECT_EQ(out[0].target, ComponentId{1});
}

TEST(DragProcessor, TwoFingersMoveTheCentroid) {
  DragProcessor drag;
  const auto out = run(drag, {touch(1, Phase::Down, {0, 0}), touch(2, Phase::Down, {10, 0}),
                              touch(1, Phase::Move, {4, 0}), touch(1, Phase::Up, {4, 0}),
                              touch(2, Phase::Move, {13, 0}), touch(2, Phase::Cancel, {13, 0})});
  EXPECT_EQ(phases(out), (std::vector{Started, Updated, Updated, Canceled}));
  EXPECT_EQ(out[1].translation, (Vec2{2, 0}));
  EXPECT_EQ(out[2].translation, (Vec2{3, 0}));
}

TEST(RotateProcessor, TwoFingerRotate) {
  RotateProcessor rotate;
  const auto out = run(rotate, {touch(1, Phase::Down, {0, 0}), touch(2, Phase::Down, {2, 0}),
                                touch(2, Phase::Move, {0, 2}), touch(1, Phase::Up, {0, 0}),
                                touch(2, Phase::Up, {0, 2})});
  EXPECT_EQ(phases(out), (std::vector{Started, Updated, Ended}));
  EXPECT_DOUBLE_EQ(out[1].angle, kPi / 2);
  EXPECT_EQ(out[1].pivot, (Vec2{0, 1}));
}

TEST(RotateProcessor, ThirdFingerIsASpareUntilPromoted) {
  RotateProcessor rotate;
  const auto out =
      run(rotate, {touch(1, Phase::Down, {0, 0}), touch(2, Phase::Down, {2, 0}),
                   touch(3, Phase::Down, {0, 5}), touch(3, Phase::Move, {5, 5}),
                   touch(1, Phase::Up, {0, 0}),
                   // Primaries are now 2 and 3: (2,0) -> (5,5).
                   touch(3, Phase::Move, {2, 3}), touch(2, Phase::Up, {2, 0}),
                   touch(3, Phase::Up, {2, 3})});
  EXPECT_EQ(phases(out), (std::vector{Started, Updated, Ended}));
  const auto expected = rotate_step({2, 0}, {2, 0}, {5, 5}, {2, 3});
  EXPECT_EQ(out[1].angle, expected->angle);
}

TEST(RotateProcessor, DegenerateStepIsSkippedNotCancelled) {
  RotateProcessor rotate;
  const auto out = run(rotate, {touch(1, Phase::Down, {0, 0}), touch(2, Phase::Down, {2, 0}),
                                touch(2, Phase::Move, {0, 0}), touch(2, Phase::Move, {0, 2}),
                                touch(1, Phase::Up, {0, 0})});
  // The collapsed step is skipped; the next measurable step covers it.
  EXPECT_EQ(phases(out), (std::vector{Started, Updated, Ended}));
  EXPECT_DOUBLE_EQ(out[1].angle, kPi / 2);
}

TEST(ScaleProcessor, CancelEndsWithCanceled) {
  ScaleProcessor scale;
  const auto out = run(scale, {touch(1, Phase::Down, {0, 0}), touch(2, Phase::Down, {2, 0}),
                               touch(1, Phase::Move, {-1, 0}), touch(2, Phase::Move, {3, 0}),
                               touch(2, Phase::Cancel, {3, 0})});
  EXPECT_EQ(phases(out), (std::vector{Started, Updated, Updated, Canceled}));
  EXPECT_DOUBLE_EQ(out[1].factor * out[2].factor, 2.0);
}

TEST(ZoomPanProcessor, PanAndZoom) {
  ZoomPanProcessor zp;
  const auto out = run(zp, {touch(1, Phase::Down, {0, 0}), touch(2, Phase::Down, {2, 0}),
                            touch(1, Phase::Move, {-1, 4}), touch(1, Phase::Up, {-1, 4})});
  ASSERT_EQ(out.size(), 3U);
  EXPECT_EQ(out[1].translation, (Vec2{-0.5, 2}));
  EXPECT_DOUBLE_EQ(out[1].factor, std::sqrt(25.0) / 2);
}

TEST(TapProcessor, TapIsAStartedEndedPair) {
  TapProcessor tap;
  const auto out = run(tap, {touch(1, Phase::Down, {5, 5}, 0), touch(1, Phase::Up, {6, 5}, 1000)});
  EXPECT_EQ(phases(out), (std::vector{Started, Ended}));
  EXPECT_EQ(out[1].position, (Vec2{5, 5}));
  EXPECT_TRUE(run(tap, {touch(2, Phase::Down, {5, 5}, 0), touch(2, Phase::Cancel, {5, 5}, 1)}).empty());
}

TEST(GestureOracle, RandomTracesMatchSimilarityFit) {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 200; ++i) {
    const auto trace = gestures::random_pair_trace(rng);
    ASSERT_EQ(gestures::check_against_fit(trace, 1e-6), "") << "trace " << i;
  }
}

TEST(ComponentProcessing, LockedWithKindsPresentAtDown) {
  std::vector<std::unique_ptr<GestureProcessor>> processors;
  processors.push_back(std::make_unique<DragProcessor>());
  CursorLockTable locks;
  auto out = process_component_event(touch(1, Phase::Down, {0, 0}), locks, processors);
  EXPECT_EQ(out.size(), 1U);
  ASSERT_NE(locks.find(CursorId{1}), nullptr);

  // Registered after the cursor landed: never sees it.
  processors.push_back(std::make_unique<TapProcessor>());
  out = process_component_event(touch(1, Phase::Up, {0, 0}), locks, processors);
  EXPECT_EQ(phases(out), (std::vector{Ended}));
  EXPECT_EQ(locks.find(CursorId{1}), nullptr);
}

TEST(ComponentProcessing, CursorStaysWithItsFirstComponent) {
  std::vector<std::unique_ptr<GestureProcessor>> processors;
  processors.push_back(std::make_unique<DragProcessor>());
  CursorLockTable locks;
  process_component_event(touch(1, Phase::Down, {0, 0}, 0, ComponentId{1}), locks, processors);
  EXPECT_TRUE(process_component_event(touch(1, Phase::Down, {0, 0}, 0, ComponentId{2}), locks, processors).empty());
  EXPECT_TRUE(process_component_event(touch(1, Phase::Move, {1, 0}, 0, ComponentId{2}), locks, processors).empty());
  EXPECT_EQ(locks.find(CursorId{1})->component, ComponentId{1});
  EXPECT_FALSE(locks.lock(CursorId{1}, ComponentId{3}, {}));
}

TEST(ComponentProcessing, FuzzedInterleavingsKeepLocksAndLifecycles) {
  std::mt19937_64 rng(53);
  for (int round = 0; round < 200; ++round) {
    std::map<ComponentId, std::vector<std::unique_ptr<GestureProcessor>>> components;
    for (std::uint64_t c = 1; c <= 3; ++c) {
      auto& ps = components[ComponentId{c}];
      ps.push_back(std::make_unique<DragProcessor>());
      ps.push_back(std::make_unique<RotateProcessor>());
      ps.push_back(std::make_unique<ScaleProcessor>());
      ps.push_back(std::make_unique<TapProcessor>());
    }
    CursorLockTable locks;
    std::map<CursorId, ComponentId> bound;
    std::map<std::uint64_t, bool> live;
    std::vector<GestureEvent> all;
    std::uint64_t next_cursor = 1;
    std::uniform_real_distribution<double> coord(0, 100);
    for (int step = 0; step < 200; ++step) {
      UnifiedInputEvent ev;
      std::vector<std::uint64_t> live_ids;
      for (const auto& [id, on] : live) {
        if (on) live_ids.push_back(id);
      }
      if (live_ids.empty() || rng() % 4 == 0) {
        ev = touch(next_cursor, Phase::Down, {coord(rng), coord(rng)}, step);
        live[next_cursor++] = true;
      } else {
        const auto id = live_ids[rng() % live_ids.size()];
        const auto k = rng() % 8;
        const Phase phase = k < 6 ? Phase::Move : k == 6 ? Phase::Up : Phase::Cancel;
        ev = touch(id, phase, {coord(rng), coord(rng)}, step);
        if (phase != Phase::Move) live[id] = false;
      }
      ev.target = ComponentId{1 + rng() % 3};
      // A cursor's later events follow its lock, as the target resolver guarantees.
      if (const auto it = bound.find(ev.cursor_id); it != bound.end()) {
        ev.target = it->second;
      }
      auto& ps = components[*ev.target];
      auto out = process_component_event(ev, locks, ps);
      all.insert(all.end(), out.begin(), out.end());
      if (ev.phase == Phase::Down) {
        bound[ev.cursor_id] = *ev.target;
      }
      if (const auto* e = locks.find(ev.cursor_id)) {
        ASSERT_EQ(e->component, bound.at(ev.cursor_id));
      }
    }
    ASSERT_EQ(gestures::check_gesture_lifecycles(all), "") << "round " << round;
  }
}

TEST(Dispatch, ListenersRunInOrderAndFailuresAreIsolated) {
  std::vector<int> calls;
  const std::vector<GestureListener> listeners{
      [&](const GestureEvent&) {
        calls.push_back(1);
        throw std::runtime_error("boom");
      },
      [&](const GestureEvent&) { calls.push_back(2); },
      [&](const GestureEvent&) {
        calls.push_back(3);
        throw 42;
      }};
  const auto r = dispatch(GestureEvent{}, listeners);
  EXPECT_EQ(calls, (std::vector{1, 2, 3}));
  EXPECT_EQ(r.invoked, 3U);
  EXPECT_EQ(r.failed, 2U);
  EXPECT_EQ(dispatch(GestureEvent{}, {}).invoked, 0U);
}

TEST(GestureLog, FixedKeyOrder) {
  GestureEvent g;
  g.kind = GestureKind::Rotate;
  g.phase = Updated;
  g.target = ComponentId{4};
  g.angle = 0.5;
  g.pivot = {1, 2.25};
  EXPECT_EQ(format_gesture_record(7, g),
            R"({"frame":7,"kind":"rotate","phase":"updated","target":4,"angle":0.5,"px":1,"py":2.25})");
  g.kind = GestureKind::Drag;
  g.translation = {-3, 0.1};
  EXPECT_EQ(format_gesture_record(0, g),
            R"({"frame":0,"kind":"drag","phase":"updated","target":4,"dx":-3,"dy":0.1})");
}
