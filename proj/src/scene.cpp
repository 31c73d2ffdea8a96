#include "touchcore/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace touchcore {
namespace {

bool finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 p3, Vec2 p4) {
  const int d1 = orientation(p3, p4, p1);
  const int d2 = orientation(p3, p4, p2);
  const int d3 = orientation(p1, p2, p3);
  const int d4 = orientation(p1, p2, p4);
  if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) {
    return true;
  }
  return (d1 == 0 && on_segment(p3, p4, p1)) || (d2 == 0 && on_segment(p3, p4, p2)) ||
         (d3 == 0 && on_segment(p1, p2, p3)) || (d4 == 0 && on_segment(p1, p2, p4));
}

[[noreturn]] void invalid_shape(const std::string& why) {
  throw SceneError(SceneErrc::InvalidShape, why);
}

}  // namespace

std::string_view shape_kind(const Shape& shape) {
  static constexpr std::string_view kNames[] = {"rectangle", "ellipse", "polygon", "line"};
  return kNames[shape.index()];
}

bool point_in_polygon(std::span<const Vec2> polygon, Vec2 p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

bool polygon_is_simple(std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) {
    return false;
  }
  auto edge = [&](std::size_t i) {
    return std::pair{polygon[i], polygon[(i + 1) % n]};
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto [a, b] = edge(i);
    if (a == b) {
      return false;
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto [c, d] = edge(j);
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (!adjacent) {
        if (segments_intersect(a, b, c, d)) {
          return false;
        }
        continue;
      }
      // Adjacent edges share one vertex; they must not fold back over each other.
      const Vec2 shared = j == i + 1 ? b : a;
      const Vec2 far_i = j == i + 1 ? a : b;
      const Vec2 far_j = j == i + 1 ? d : c;
      if (orientation(shared, far_i, far_j) == 0 && dot(far_i - shared, far_j - shared) > 0.0) {
        return false;
      }
    }
  }
  return true;
}

void validate_shape(const Shape& shape) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RectangleShape>) {
          if (!(s.width > 0.0) || !(s.height > 0.0) || !std::isfinite(s.width) ||
              !std::isfinite(s.height)) {
            invalid_shape("rectangle extents must be positive and finite");
          }
        } else if constexpr (std::is_same_v<T, EllipseShape>) {
          if (!(s.rx > 0.0) || !(s.ry > 0.0) || !std::isfinite(s.rx) || !std::isfinite(s.ry)) {
            invalid_shape("ellipse radii must be positive and finite");
          }
        } else if constexpr (std::is_same_v<T, PolygonShape>) {
          if (!std::all_of(s.vertices.begin(), s.vertices.end(), finite)) {
            invalid_shape("polygon vertices must be finite");
          }
          if (!polygon_is_simple(s.vertices)) {
            invalid_shape("polygon must have at least 3 vertices and no self-intersections");
          }
        } else {
          if (!finite(s.a) || !finite(s.b) || !(s.half_width > 0.0) ||
              !std::isfinite(s.half_width)) {
            invalid_shape("line needs finite endpoints and a positive half width");
          }
        }
      },
      shape);
}

bool shape_contains(const Shape& shape, Vec2 p) {
  return std::visit(
      [p](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RectangleShape>) {
          return std::abs(p.x) <= s.width * 0.5 && std::abs(p.y) <= s.height * 0.5;
        } else if constexpr (std::is_same_v<T, EllipseShape>) {
          const double u = p.x / s.rx;
          const double v = p.y / s.ry;
          return u * u + v * v <= 1.0;
        } else if constexpr (std::is_same_v<T, PolygonShape>) {
          return point_in_polygon(s.vertices, p);
        } else {
          return distance_to_segment(p, s.a, s.b) <= s.half_width;
        }
      },
      shape);
}

Scene::Scene(std::string name) : name_(std::move(name)) {
  components_.push_back(std::make_unique<Component>(ComponentId{0}, std::nullopt, Affine2D{}, false));
}

ComponentId Scene::create(std::optional<Shape> shape, Affine2D local, bool visible) {
  if (shape) {
    validate_shape(*shape);
  }
  const ComponentId id{components_.size()};
  components_.push_back(std::make_unique<Component>(id, std::move(shape), local, visible));
  return id;
}

Component* Scene::find(ComponentId id) {
  const auto i = to_underlying(id);
  return i < components_.size() ? components_[i].get() : nullptr;
}

const Component* Scene::find(ComponentId id) const {
  const auto i = to_underlying(id);
  return i < components_.size() ? components_[i].get() : nullptr;
}

Component& Scene::checked(ComponentId id) {
  if (auto* c = find(id)) {
    return *c;
  }
  throw SceneError(SceneErrc::UnknownComponent, "no component " + std::to_string(to_underlying(id)));
}

const Component& Scene::checked(ComponentId id) const {
  if (const auto* c = find(id)) {
    return *c;
  }
  throw SceneError(SceneErrc::UnknownComponent, "no component " + std::to_string(to_underlying(id)));
}

Component& Scene::component(ComponentId id) { return checked(id); }
const Component& Scene::component(ComponentId id) const { return checked(id); }

bool Scene::is_ancestor(ComponentId maybe_ancestor, ComponentId id) const {
  for (std::optional<ComponentId> cur = id; cur; cur = checked(*cur).parent_) {
    if (*cur == maybe_ancestor) {
      return true;
    }
  }
  return false;
}

void Scene::add_child(ComponentId parent, ComponentId child) {
  auto& p = checked(parent);
  auto& c = checked(child);
  if (child == canvas_id() || is_ancestor(child, parent)) {
    throw SceneError(SceneErrc::CycleError, "adding component " +
                                                std::to_string(to_underlying(child)) +
                                                " would create a cycle");
  }
  if (c.parent_) {
    throw SceneError(SceneErrc::AlreadyAttached, "component " +
                                                     std::to_string(to_underlying(child)) +
                                                     " already has a parent");
  }
  c.parent_ = parent;
  p.children_.push_back(child);
}

void Scene::remove_child(ComponentId parent, ComponentId child) {
  auto& p = checked(parent);
  auto& c = checked(child);
  if (c.parent_ != parent) {
    throw SceneError(SceneErrc::NotAChild, "component " + std::to_string(to_underlying(child)) +
                                               " is not a child of " +
                                               std::to_string(to_underlying(parent)));
  }
  p.children_.erase(std::find(p.children_.begin(), p.children_.end(), child));
  c.parent_.reset();
}

bool Scene::is_attached(ComponentId id) const {
  ComponentId cur = id;
  for (auto parent = checked(cur).parent_; parent; parent = checked(cur).parent_) {
    cur = *parent;
  }
  return cur == canvas_id();
}

Affine2D Scene::global_transform(ComponentId id) const {
  std::vector<const Component*> chain;
  const Component* c = &checked(id);
  while (c->id() != canvas_id()) {
    chain.push_back(c);
    if (!c->parent_) {
      throw SceneError(SceneErrc::Detached, "component " + std::to_string(to_underlying(id)) +
                                                " is not attached to the canvas");
    }
    c = &checked(*c->parent_);
  }
  Affine2D g = camera_;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    g = g * (*it)->local;
  }
  return g;
}

std::optional<ComponentId> Scene::hit_subtree(ComponentId id, const Affine2D& parent,
                                              Vec2 world) const {
  const Component& c = *components_[to_underlying(id)];
  const Affine2D g = id == canvas_id() ? camera_ : parent * c.local;
  const auto inv = g.inverse();
  if (!inv) {
    ++unhittable_;
    return std::nullopt;
  }
  for (auto it = c.children_.rbegin(); it != c.children_.rend(); ++it) {
    if (auto hit = hit_subtree(*it, g, world)) {
      return hit;
    }
  }
  if (c.visible && c.shape && shape_contains(*c.shape, inv->apply(world))) {
    return id;
  }
  return std::nullopt;
}

std::optional<ComponentId> Scene::hit_test(Vec2 world) const {
  auto hit = hit_subtree(canvas_id(), Affine2D{}, world);
  if (!hit) {
    return std::nullopt;
  }
  for (std::optional<ComponentId> cur = hit; cur; cur = checked(*cur).parent_) {
    if (checked(*cur).pick_composite_root) {
      return cur;
    }
  }
  return hit;
}

void Scene::apply_world_op(ComponentId id, const Affine2D& op, Vec2 pivot) {
  auto& c = checked(id);
  if (id == canvas_id()) {
    camera_ = Affine2D::translation(pivot) * op * Affine2D::translation(-pivot) * camera_;
    return;
  }
  if (!c.parent_) {
    throw SceneError(SceneErrc::Detached, "component " + std::to_string(to_underlying(id)) +
                                              " is not attached to the canvas");
  }
  const auto inv = global_transform(*c.parent_).inverse();
  if (!inv) {
    throw SceneError(SceneErrc::SingularTransform, "parent transform is not invertible");
  }
  const Vec2 q = inv->apply(pivot);
  c.local = Affine2D::translation(q) * op * Affine2D::translation(-q) * c.local;
}

void Scene::apply_translate(ComponentId id, Vec2 delta) {
  auto& c = checked(id);
  if (id == canvas_id()) {
    camera_ = Affine2D::translation(delta) * camera_;
    return;
  }
  if (!c.parent_) {
    throw SceneError(SceneErrc::Detached, "component " + std::to_string(to_underlying(id)) +
                                              " is not attached to the canvas");
  }
  const auto inv = global_transform(*c.parent_).inverse();
  if (!inv) {
    throw SceneError(SceneErrc::SingularTransform, "parent transform is not invertible");
  }
  c.local = Affine2D::translation(inv->apply_linear(delta)) * c.local;
}

void Scene::apply_rotate(ComponentId id, double angle, Vec2 pivot) {
  apply_world_op(id, Affine2D::rotation(angle), pivot);
}

void Scene::apply_scale(ComponentId id, double factor, Vec2 pivot) {
  if (!(factor > 0.0)) {
    throw SceneError(SceneErrc::NonPositiveFactor, "scale factor must be positive");
  }
  apply_world_op(id, Affine2D::scaling(factor), pivot);
}

void Scene::apply_zoom_pan(Vec2 delta, double factor, Vec2 pivot) {
  if (!(factor > 0.0)) {
    throw SceneError(SceneErrc::NonPositiveFactor, "zoom factor must be positive");
  }
  camera_ = Affine2D::translation(pivot) * Affine2D::scaling(factor) *
            Affine2D::translation(-pivot) * Affine2D::translation(delta) * camera_;
}

SceneSnapshot Scene::snapshot(std::uint64_t frame) const {
  SceneSnapshot snap;
  snap.frame = frame;
  snap.scene = name_;
  // Explicit stack instead of recursion; children pushed in reverse so they
  // pop in draw order.
  std::vector<std::pair<ComponentId, Affine2D>> stack{{canvas_id(), camera_}};
  while (!stack.empty()) {
    const auto [id, g] = stack.back();
    stack.pop_back();
    const Component& c = *components_[to_underlying(id)];
    if (c.visible && c.shape) {
      snap.items.push_back(SnapshotItem{id, *c.shape, g, snap.items.size()});
    }
    for (auto it = c.children_.rbegin(); it != c.children_.rend(); ++it) {
      stack.emplace_back(*it, g * components_[to_underlying(*it)]->local);
    }
  }
  return snap;
}

std::string snapshot_document(const SceneSnapshot& snapshot) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["schema"] = kSceneSchema;
  doc["frame"] = snapshot.frame;
  doc["scene"] = snapshot.scene;
  doc["viewport"] = {{"width", snapshot.viewport.width}, {"height", snapshot.viewport.height}};
  ojson items = ojson::array();
  for (const auto& item : snapshot.items) {
    ojson params = std::visit(
        [](const auto& s) -> ojson {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, RectangleShape>) {
            return {{"width", s.width}, {"height", s.height}};
          } else if constexpr (std::is_same_v<T, EllipseShape>) {
            return {{"rx", s.rx}, {"ry", s.ry}};
          } else if constexpr (std::is_same_v<T, PolygonShape>) {
            ojson vertices = ojson::array();
            for (const auto& v : s.vertices) {
              vertices.push_back({v.x, v.y});
            }
            return {{"vertices", vertices}};
          } else {
            return {{"a", {s.a.x, s.a.y}}, {"b", {s.b.x, s.b.y}}, {"halfWidth", s.half_width}};
          }
        },
        item.shape);
    const auto t = item.world.coefficients();
    items.push_back({{"id", to_underlying(item.id)},
                     {"kind", shape_kind(item.shape)},
                     {"params", std::move(params)},
                     {"transform", {t[0], t[1], t[2], t[3], t[4], t[5]}},
                     {"drawIndex", item.draw_index}});
  }
  doc["items"] = std::move(items);
  ojson cursors = ojson::array();
  for (const auto& c : snapshot.cursors) {
    cursors.push_back({{"id", to_underlying(c.id)}, {"x", c.position.x}, {"y", c.position.y}});
  }
  doc["cursors"] = std::move(cursors);
  return doc.dump();
}

void make_interactive(Scene& scene, ComponentId id, const TapConfig& tap, double eps) {
  auto& c = scene.component(id);
  c.add_processor(std::make_unique<DragProcessor>());
  c.add_processor(std::make_unique<RotateProcessor>(eps));
  c.add_processor(std::make_unique<ScaleProcessor>(eps));
  c.add_processor(std::make_unique<TapProcessor>(tap));

  Scene* s = &scene;
  c.add_listener(GestureKind::Drag, [s, id](const GestureEvent& g) {
    if (g.phase == GesturePhase::Updated) {
      s->apply_translate(id, g.translation);
    }
  });
  c.add_listener(GestureKind::Rotate, [s, id](const GestureEvent& g) {
    if (g.phase == GesturePhase::Updated) {
      s->apply_rotate(id, g.angle, g.pivot);
    }
  });
  c.add_listener(GestureKind::Scale, [s, id](const GestureEvent& g) {
    if (g.phase == GesturePhase::Updated) {
      s->apply_scale(id, g.factor, g.pivot);
    }
  });
}

void enable_canvas_zoom_pan(Scene& scene, double eps) {
  auto& canvas = scene.canvas();
  canvas.add_processor(std::make_unique<ZoomPanProcessor>(eps));
  Scene* s = &scene;
  canvas.add_listener(GestureKind::ZoomPan, [s](const GestureEvent& g) {
    if (g.phase == GesturePhase::Updated) {
      s->apply_zoom_pan(g.translation, g.factor, g.pivot);
    }
  });
}

std::unique_ptr<Scene> make_demo_scene(Viewport viewport, const TapConfig& tap, double eps) {
  auto scene = std::make_unique<Scene>("demo");
  const double w = viewport.width;
  const double h = viewport.height;
  const double u = std::min(w, h);

  auto place = [&](Shape shape, double fx, double fy, double angle) {
    const auto id = scene->create(std::move(shape), Affine2D::translation({fx * w, fy * h}) *
                                                        Affine2D::rotation(angle));
    scene->add_child(scene->canvas_id(), id);
    make_interactive(*scene, id, tap, eps);
    return id;
  };

  place(RectangleShape{0.22 * u, 0.15 * u}, 0.18, 0.22, 0.0);
  place(RectangleShape{0.18 * u, 0.18 * u}, 0.45, 0.25, 0.3);
  place(RectangleShape{0.25 * u, 0.12 * u}, 0.78, 0.2, -0.2);
  place(RectangleShape{0.15 * u, 0.22 * u}, 0.2, 0.7, 0.1);
  place(EllipseShape{0.1 * u, 0.07 * u}, 0.5, 0.55, 0.0);
  const double r = 0.11 * u;
  std::vector<Vec2> star;
  for (int i = 0; i < 10; ++i) {
    const double a = -std::numbers::pi / 2 + i * std::numbers::pi / 5;
    const double rr = i % 2 == 0 ? r : r * 0.45;
    star.push_back({rr * std::cos(a), rr * std::sin(a)});
  }
  place(PolygonShape{std::move(star)}, 0.8, 0.72, 0.0);

  const auto group = scene->create_group(Affine2D::translation({0.5 * w, 0.82 * h}));
  scene->component(group).pick_composite_root = true;
  scene->add_child(scene->canvas_id(), group);
  const auto base = scene->create(RectangleShape{0.24 * u, 0.1 * u});
  const auto knob = scene->create(EllipseShape{0.05 * u, 0.05 * u},
                                  Affine2D::translation({0.12 * u, 0.0}));
  scene->add_child(group, base);
  scene->add_child(group, knob);
  make_interactive(*scene, group, tap, eps);

  enable_canvas_zoom_pan(*scene, eps);
  return scene;
}

}  // namespace touchcore
