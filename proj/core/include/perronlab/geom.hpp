#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace perronlab {

/// Absolute tolerance used by equality and containment tests on coordinates.
inline constexpr double kGeomEps = 1e-9;

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Axis-parallel box; also used as a raster window.
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Box& o, double eps = kGeomEps) const {
    return o.x0 >= x0 - eps && o.y0 >= y0 - eps && o.x1 <= x1 + eps && o.y1 <= y1 + eps;
  }
  bool overlaps(const Box& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
  Box dilated(double dx, double dy) const { return {x0 - dx, y0 - dy, x1 + dx, y1 + dy}; }
  Box merged(const Box& o) const {
    return {std::fmin(x0, o.x0), std::fmin(y0, o.y0), std::fmax(x1, o.x1), std::fmax(y1, o.y1)};
  }
};

class ConvexPolygon;

/// Origin-centred rotated rectangle [-L/2, L/2] x [-l/2, l/2] rotated by `angle`.
///
/// The constructor canonicalises so that half_length >= half_width, rotating by
/// pi/2 when the sides come in swapped, and folds the angle into (-pi/2, pi/2].
class Rect {
 public:
  Rect(double half_length, double half_width, double angle);

  static Rect from_sides(double length, double width, double angle) {
    return Rect(0.5 * length, 0.5 * width, angle);
  }

  double half_length() const { return half_length_; }
  double half_width() const { return half_width_; }
  double length() const { return 2.0 * half_length_; }
  double width() const { return 2.0 * half_width_; }
  double angle() const { return angle_; }
  double area() const { return 4.0 * half_length_ * half_width_; }
  double diameter() const { return 2.0 * std::hypot(half_length_, half_width_); }

  /// Unit vector along the long side.
  Vec2 long_axis() const { return {std::cos(angle_), std::sin(angle_)}; }
  /// Unit vector along the short side (long axis rotated by +pi/2).
  Vec2 short_axis() const { return {-std::sin(angle_), std::cos(angle_)}; }

  /// Corners in counterclockwise order, translated by `offset`.
  std::array<Vec2, 4> corners(Vec2 offset = {}) const;
  ConvexPolygon polygon(Vec2 offset = {}) const;
  Box bounding_box(Vec2 offset = {}) const;

  Rect scaled(double s) const { return Rect(half_length_ * s, half_width_ * s, angle_); }
  Rect rotated(double d_angle) const { return Rect(half_length_, half_width_, angle_ + d_angle); }

  /// Coordinates of `p` in the rectangle frame, divided by the half-sides.
  Vec2 normalized_coords(Vec2 p) const {
    return {dot(p, long_axis()) / half_length_, dot(p, short_axis()) / half_width_};
  }

  bool contains(Vec2 p, double eps = kGeomEps) const;
  bool is_axis_parallel(double eps = kGeomEps) const;

 private:
  double half_length_;
  double half_width_;
  double angle_;
};

/// Strictly convex polygon with counterclockwise vertices.
///
/// Construction drops repeated points and merges collinear triples; it throws
/// std::invalid_argument when fewer than three vertices remain or the input is
/// not convex. Clockwise input is reversed.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Vec2> vertices, double eps = 1e-12);

  /// Same as the constructor but reports degeneracy through an empty optional.
  static std::optional<ConvexPolygon> try_make(std::vector<Vec2> vertices, double eps = 1e-12);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Vec2& operator[](std::size_t i) const { return vertices_[i]; }

  double area() const;
  double perimeter() const;
  Box bounding_box() const;

  /// Inclusive point test with absolute tolerance `eps`.
  bool contains(Vec2 p, double eps = kGeomEps) const;
  /// True when `p` lies inside with clearance larger than `eps` from every edge.
  bool contains_strictly(Vec2 p, double eps = kGeomEps) const;

  ConvexPolygon translated(Vec2 t) const;
  ConvexPolygon scaled(double s) const;

  /// Distance from the origin to the boundary along unit direction `u`.
  /// Requires the origin to be interior.
  double radial_distance(Vec2 u) const;

 private:
  struct Unchecked {};
  ConvexPolygon(Unchecked, std::vector<Vec2> v) : vertices_(std::move(v)) {}
  friend ConvexPolygon minkowski_sum(const ConvexPolygon&, const ConvexPolygon&);

  std::vector<Vec2> vertices_;
};

/// Triangle given by its three corners; non-degenerate by construction.
struct Triangle {
  Vec2 a;
  Vec2 b;
  Vec2 c;

  Triangle(Vec2 a_, Vec2 b_, Vec2 c_);

  double area() const { return 0.5 * std::fabs(cross(b - a, c - a)); }
  ConvexPolygon polygon() const { return ConvexPolygon({a, b, c}); }
  Triangle translated(Vec2 t) const { return Triangle(a + t, b + t, c + t); }
};

/// Signed shoelace area of an arbitrary closed vertex loop.
double signed_area(std::span<const Vec2> loop);

/// Minkowski sum of two convex polygons by merging their edge sequences.
ConvexPolygon minkowski_sum(const ConvexPolygon& p, const ConvexPolygon& q);

/// The set {p - q : p in r, q in r2}. Both rectangles are centrally symmetric,
/// so this is the Minkowski sum r + r2.
ConvexPolygon difference_set(const Rect& r, const Rect& r2);

struct BoundingSides {
  double length = 0.0;  // along r's long axis
  double width = 0.0;   // along r's short axis
};

/// Side lengths of the smallest rectangle parallel to `r` containing
/// difference_set(r, r2), from the closed forms
///   L + L'|cos w| + l'|sin w|  and  l + L'|sin w| + l'|cos w|,
/// where w is the angle of r2 relative to r.
BoundingSides bounding_rect_hat(const Rect& r, const Rect& r2);

/// max(l L' |cos w|, L L' |sin w|), a lower bound for |difference_set(r, r2)|.
double area_lower_bound(const Rect& r, const Rect& r2);

/// Relative slack applied to normalised coordinates in scaled_contains.
inline constexpr double kScaleEps = 1e-12;

/// True iff every vertex of `p` lies in alpha * r.
bool scaled_contains(const Rect& r, double alpha, const ConvexPolygon& p, double rel_eps = kScaleEps);

/// Exact intersection of two convex polygons; empty when they do not overlap
/// in a set of positive area.
std::optional<ConvexPolygon> clip(const ConvexPolygon& p, const ConvexPolygon& q);

/// Area of the intersection, 0 when empty. Avoids building a ConvexPolygon.
double intersection_area(std::span<const Vec2> p, std::span<const Vec2> q);

/// Regular polygon with `sides` vertices circumscribing the disk of `radius`.
ConvexPolygon circumscribed_polygon(double radius, int sides, Vec2 center = {});

}  // namespace perronlab
