#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "touchcore/geometry.hpp"
#include "touchcore/gesture.hpp"
#include "touchcore/ids.hpp"

namespace touchcore {

// Primitive shapes in component-local units. Rectangles and ellipses are
// centered on the local origin; polygons and lines use coordinates as given.
struct RectangleShape {
  double width = 0.0;
  double height = 0.0;
  friend bool operator==(const RectangleShape&, const RectangleShape&) = default;
};

struct EllipseShape {
  double rx = 0.0;
  double ry = 0.0;
  friend bool operator==(const EllipseShape&, const EllipseShape&) = default;
};

struct PolygonShape {
  std::vector<Vec2> vertices;  // simple, at least 3
  friend bool operator==(const PolygonShape&, const PolygonShape&) = default;
};

struct LineShape {
  Vec2 a;
  Vec2 b;
  double half_width = 0.0;
  friend bool operator==(const LineShape&, const LineShape&) = default;
};

using Shape = std::variant<RectangleShape, EllipseShape, PolygonShape, LineShape>;

std::string_view shape_kind(const Shape& shape);

/// Throws SceneError(InvalidShape) for non-positive extents, non-finite
/// coordinates, or a polygon that is not simple.
void validate_shape(const Shape& shape);

/// Containment in local coordinates. Rectangles, ellipses and lines include
/// their boundary; polygons follow the even-odd crossing rule.
bool shape_contains(const Shape& shape, Vec2 local);

/// Even-odd rule via horizontal ray crossings.
bool point_in_polygon(std::span<const Vec2> polygon, Vec2 p);

bool polygon_is_simple(std::span<const Vec2> polygon);

enum class SceneErrc {
  Detached,
  CycleError,
  NotAChild,
  AlreadyAttached,
  NonPositiveFactor,
  SingularTransform,
  UnknownComponent,
  InvalidShape,
  UnknownScene,
};

class SceneError : public std::runtime_error {
 public:
  SceneError(SceneErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  SceneErrc code() const noexcept { return code_; }

 private:
  SceneErrc code_;
};

/// Scene-graph node. Structure (parent/children) is managed by Scene; the
/// remaining state is public for direct manipulation.
class Component {
 public:
  Component(ComponentId id, std::optional<Shape> shape, Affine2D local, bool visible)
      : id_(id), shape(std::move(shape)), local(local), visible(visible) {}

  ComponentId id() const { return id_; }
  std::optional<ComponentId> parent() const { return parent_; }
  std::span<const ComponentId> children() const { return children_; }

  void add_processor(std::unique_ptr<GestureProcessor> processor) {
    processors_.push_back(std::move(processor));
  }
  std::span<const std::unique_ptr<GestureProcessor>> processors() const { return processors_; }

  void add_listener(GestureKind kind, GestureListener listener) {
    listeners_[kind].push_back(std::move(listener));
  }
  std::span<const GestureListener> listeners(GestureKind kind) const {
    const auto it = listeners_.find(kind);
    return it == listeners_.end() ? std::span<const GestureListener>{} : it->second;
  }

 private:
  friend class Scene;

  ComponentId id_;
  std::optional<ComponentId> parent_;
  std::vector<ComponentId> children_;  // draw order, later is on top
  std::vector<std::unique_ptr<GestureProcessor>> processors_;
  std::map<GestureKind, std::vector<GestureListener>> listeners_;

 public:
  std::optional<Shape> shape;  // invisible grouping nodes have none
  Affine2D local;
  bool visible = true;
  bool pick_composite_root = false;
};

struct SnapshotItem {
  ComponentId id{};
  Shape shape;
  Affine2D world;
  std::uint64_t draw_index = 0;
  friend bool operator==(const SnapshotItem&, const SnapshotItem&) = default;
};

struct SnapshotCursor {
  CursorId id{};
  Vec2 position;
  friend bool operator==(const SnapshotCursor&, const SnapshotCursor&) = default;
};

/// Flattened world-space view of a scene at a frame boundary. Plain value.
struct SceneSnapshot {
  std::uint64_t frame = 0;
  std::string scene;
  Viewport viewport;
  std::vector<SnapshotItem> items;
  std::vector<SnapshotCursor> cursors;
  friend bool operator==(const SceneSnapshot&, const SceneSnapshot&) = default;
};

inline constexpr std::string_view kSceneSchema = "touchcore-scene/1";

/// "touchcore-scene/1" JSON document. Each transform is the coefficient list
/// (a, b, c, d, e, f) of x' = a x + c y + e, y' = b x + d y + f.
std::string snapshot_document(const SceneSnapshot& snapshot);

/// A tree of components rooted at the canvas. The canvas's world transform is
/// the camera; every other component's world transform is its parent's world
/// transform times its local transform.
class Scene {
 public:
  explicit Scene(std::string name);
  Scene(const Scene&) = delete;
  Scene& operator=(const Scene&) = delete;

  const std::string& name() const { return name_; }

  ComponentId canvas_id() const { return ComponentId{0}; }
  Component& canvas() { return component(canvas_id()); }

  /// Creates a detached component. Shapes are validated.
  ComponentId create(std::optional<Shape> shape, Affine2D local = {}, bool visible = true);
  /// Invisible grouping node.
  ComponentId create_group(Affine2D local = {}) { return create(std::nullopt, local, false); }

  Component& component(ComponentId id);
  const Component& component(ComponentId id) const;
  Component* find(ComponentId id);
  const Component* find(ComponentId id) const;
  std::size_t size() const { return components_.size(); }

  /// Appends `child` on top of `parent`'s children.
  void add_child(ComponentId parent, ComponentId child);
  /// Detaches `child` with its subtree intact.
  void remove_child(ComponentId parent, ComponentId child);
  bool is_attached(ComponentId id) const;

  const Affine2D& camera() const { return camera_; }
  void set_camera(const Affine2D& camera) { camera_ = camera; }

  Affine2D global_transform(ComponentId id) const;

  /// Topmost visible shape containing `world`, redirected to its nearest
  /// composite-root ancestor (or itself) when one exists.
  std::optional<ComponentId> hit_test(Vec2 world) const;
  /// Subtrees skipped during picking because their transform was singular.
  std::uint64_t unhittable_subtrees() const { return unhittable_; }

  // Gesture actions. World-space deltas are conjugated into the parent's
  // space and prepended to the local transform, so children follow rigidly.
  void apply_translate(ComponentId id, Vec2 delta);
  void apply_rotate(ComponentId id, double angle, Vec2 pivot);
  void apply_scale(ComponentId id, double factor, Vec2 pivot);
  void apply_zoom_pan(Vec2 delta, double factor, Vec2 pivot);

  SceneSnapshot snapshot(std::uint64_t frame) const;

 private:
  Component& checked(ComponentId id);
  const Component& checked(ComponentId id) const;
  bool is_ancestor(ComponentId maybe_ancestor, ComponentId id) const;
  /// Applies `op` (given in world space about `pivot`) to `id`.
  void apply_world_op(ComponentId id, const Affine2D& op, Vec2 pivot);
  std::optional<ComponentId> hit_subtree(ComponentId id, const Affine2D& parent, Vec2 world) const;

  std::string name_;
  std::vector<std::unique_ptr<Component>> components_;  // indexed by id
  Affine2D camera_;
  mutable std::uint64_t unhittable_ = 0;
};

using SceneFactory = std::function<std::unique_ptr<Scene>()>;

/// Drag, rotate and scale processors (in that order, so each step maps the
/// old cursor pair exactly onto the new one), a tap processor, and the
/// default actions that move the component.
void make_interactive(Scene& scene, ComponentId id, const TapConfig& tap = {},
                      double eps = kDefaultDegenerateSpan);

/// Two-finger zoom and pan on the canvas, moving the camera.
void enable_canvas_zoom_pan(Scene& scene, double eps = kDefaultDegenerateSpan);

/// 5 rectangles, 2 ellipses, 1 polygon; one rectangle and one ellipse sit in
/// an invisible composite group that moves as a whole.
std::unique_ptr<Scene> make_demo_scene(Viewport viewport, const TapConfig& tap = {},
                                       double eps = kDefaultDegenerateSpan);

}  // namespace touchcore
