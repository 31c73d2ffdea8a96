#pragma once

#include <array>
#include <cmath>
#include <optional>

namespace touchcore {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return length(b - a); }
constexpr Vec2 midpoint(Vec2 a, Vec2 b) { return {(a.x + b.x) * 0.5, (a.y + b.y) * 0.5}; }

/// Distance from `p` to the closed segment [a, b].
inline double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) {
    return distance(p, a);
  }
  double t = dot(p - a, ab) / len2;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return distance(p, a + ab * t);
}

/// Planar affine map stored as the top two rows of a row-major 3x3 matrix:
///
///   | m00 m01 m02 |
///   | m10 m11 m12 |
///   |  0   0   1  |
///
/// The bottom row is implicit, so it is exactly (0, 0, 1) for every value.
class Affine2D {
 public:
  /// Determinants at or below this magnitude are treated as singular.
  static constexpr double kSingularDet = 1e-12;

  constexpr Affine2D() = default;

  static constexpr Affine2D from_rows(double m00, double m01, double m02, double m10, double m11,
                                      double m12) {
    Affine2D t;
    t.m_ = {m00, m01, m02, m10, m11, m12};
    return t;
  }

  static constexpr Affine2D translation(Vec2 d) { return from_rows(1, 0, d.x, 0, 1, d.y); }
  static constexpr Affine2D scaling(double sx, double sy) { return from_rows(sx, 0, 0, 0, sy, 0); }
  static constexpr Affine2D scaling(double s) { return scaling(s, s); }

  /// Counterclockwise in standard math axes (x right, y up).
  static Affine2D rotation(double radians) {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    return from_rows(c, -s, 0, s, c, 0);
  }

  constexpr double operator()(int row, int col) const {
    if (row == 2) {
      return col == 2 ? 1.0 : 0.0;
    }
    return m_[static_cast<std::size_t>(row * 3 + col)];
  }

  constexpr Vec2 apply(Vec2 p) const {
    return {m_[0] * p.x + m_[1] * p.y + m_[2], m_[3] * p.x + m_[4] * p.y + m_[5]};
  }

  /// Applies only the linear part (for direction vectors and deltas).
  constexpr Vec2 apply_linear(Vec2 v) const {
    return {m_[0] * v.x + m_[1] * v.y, m_[3] * v.x + m_[4] * v.y};
  }

  constexpr Vec2 translation_part() const { return {m_[2], m_[5]}; }

  constexpr double determinant() const { return m_[0] * m_[4] - m_[1] * m_[3]; }

  std::optional<Affine2D> inverse() const {
    const double det = determinant();
    if (!(std::abs(det) > kSingularDet)) {
      return std::nullopt;
    }
    const double inv = 1.0 / det;
    const double a = m_[4] * inv;
    const double b = -m_[1] * inv;
    const double c = -m_[3] * inv;
    const double d = m_[0] * inv;
    return from_rows(a, b, -(a * m_[2] + b * m_[5]), c, d, -(c * m_[2] + d * m_[5]));
  }

  /// Coefficients (a, b, c, d, e, f) of the map x' = a x + c y + e, y' = b x + d y + f,
  /// the ordering used by HTML canvas and SVG `matrix()`.
  constexpr std::array<double, 6> coefficients() const {
    return {m_[0], m_[3], m_[1], m_[4], m_[2], m_[5]};
  }

  constexpr const std::array<double, 6>& rows() const { return m_; }

  friend constexpr Affine2D operator*(const Affine2D& l, const Affine2D& r) {
    const auto& a = l.m_;
    const auto& b = r.m_;
    return from_rows(a[0] * b[0] + a[1] * b[3], a[0] * b[1] + a[1] * b[4],
                     a[0] * b[2] + a[1] * b[5] + a[2], a[3] * b[0] + a[4] * b[3],
                     a[3] * b[1] + a[4] * b[4], a[3] * b[2] + a[4] * b[5] + a[5]);
  }

  friend constexpr bool operator==(const Affine2D&, const Affine2D&) = default;

 private:
  std::array<double, 6> m_{1, 0, 0, 0, 1, 0};
};

}  // namespace touchcore
