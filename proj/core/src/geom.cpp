#include "perronlab/geom.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace perronlab {

namespace {

double fold_angle(double angle) {
  double a = std::fmod(angle, kPi);
  if (a <= -0.5 * kPi) a += kPi;
  if (a > 0.5 * kPi) a -= kPi;
  return a;
}

// Removes repeated points and collinear vertices in place; returns the signed area.
double clean_loop(std::vector<Vec2>& v, double eps) {
  if (v.empty()) return 0.0;
  Box box{v[0].x, v[0].y, v[0].x, v[0].y};
  for (const Vec2& p : v) box = box.merged({p.x, p.y, p.x, p.y});
  const double scale = std::max(std::hypot(box.width(), box.height()), 1e-300);

  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    std::vector<Vec2> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2& p = v[i];
      if (!out.empty() && norm(p - out.back()) <= eps * scale) {
        changed = true;
        continue;
      }
      out.push_back(p);
    }
    while (out.size() > 1 && norm(out.front() - out.back()) <= eps * scale) {
      out.pop_back();
      changed = true;
    }
    v.swap(out);
    if (v.size() < 3) break;

    out.clear();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 prev = out.empty() ? v[(i + n - 1) % n] : out.back();
      const Vec2& cur = v[i];
      const Vec2& next = v[(i + 1) % n];
      const Vec2 e1 = cur - prev;
      const Vec2 e2 = next - cur;
      if (std::fabs(cross(e1, e2)) <= eps * norm(e1) * norm(e2) && dot(e1, e2) > 0.0) {
        changed = true;
        continue;
      }
      out.push_back(cur);
    }
    v.swap(out);
  }
  return signed_area(v);
}

}  // namespace

// ---------------------------------------------------------------- Rect

Rect::Rect(double half_length, double half_width, double angle) {
  if (!(half_length > 0.0) || !(half_width > 0.0) || !std::isfinite(half_length) ||
      !std::isfinite(half_width) || !std::isfinite(angle)) {
    throw std::invalid_argument("Rect: half-sides must be positive and finite");
  }
  if (half_width > half_length) {
    std::swap(half_length, half_width);
    angle += 0.5 * kPi;
  }
  half_length_ = half_length;
  half_width_ = half_width;
  angle_ = fold_angle(angle);
}

std::array<Vec2, 4> Rect::corners(Vec2 offset) const {
  const Vec2 u = long_axis() * half_length_;
  const Vec2 v = short_axis() * half_width_;
  return {offset - u - v, offset + u - v, offset + u + v, offset - u + v};
}

ConvexPolygon Rect::polygon(Vec2 offset) const {
  const auto c = corners(offset);
  return ConvexPolygon({c.begin(), c.end()});
}

Box Rect::bounding_box(Vec2 offset) const {
  const double ex = half_length_ * std::fabs(std::cos(angle_)) + half_width_ * std::fabs(std::sin(angle_));
  const double ey = half_length_ * std::fabs(std::sin(angle_)) + half_width_ * std::fabs(std::cos(angle_));
  return {offset.x - ex, offset.y - ey, offset.x + ex, offset.y + ey};
}

bool Rect::contains(Vec2 p, double eps) const {
  return std::fabs(dot(p, long_axis())) <= half_length_ + eps &&
         std::fabs(dot(p, short_axis())) <= half_width_ + eps;
}

bool Rect::is_axis_parallel(double eps) const {
  return std::fabs(angle_) <= eps || std::fabs(angle_ - 0.5 * kPi) <= eps;
}

// ---------------------------------------------------------------- ConvexPolygon

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices, double eps) {
  auto p = try_make(std::move(vertices), eps);
  if (!p) throw std::invalid_argument("ConvexPolygon: degenerate or non-convex vertex list");
  vertices_ = std::move(p->vertices_);
}

std::optional<ConvexPolygon> ConvexPolygon::try_make(std::vector<Vec2> v, double eps) {
  for (const Vec2& p : v) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return std::nullopt;
  }
  double a = clean_loop(v, eps);
  if (v.size() < 3) return std::nullopt;
  if (a < 0.0) {
    std::reverse(v.begin(), v.end());
    a = -a;
  }
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = v[(i + 1) % n] - v[i];
    const Vec2 e2 = v[(i + 2) % n] - v[(i + 1) % n];
    if (cross(e1, e2) <= 0.0) return std::nullopt;
  }
  if (!(a > 0.0)) return std::nullopt;
  return ConvexPolygon(Unchecked{}, std::move(v));
}

double ConvexPolygon::area() const { return signed_area(vertices_); }

double ConvexPolygon::perimeter() const {
  double s = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    s += norm(vertices_[(i + 1) % vertices_.size()] - vertices_[i]);
  }
  return s;
}

Box ConvexPolygon::bounding_box() const {
  Box b{vertices_[0].x, vertices_[0].y, vertices_[0].x, vertices_[0].y};
  for (const Vec2& p : vertices_) b = b.merged({p.x, p.y, p.x, p.y});
  return b;
}

bool ConvexPolygon::contains(Vec2 p, double eps) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
    if (cross(e, p - vertices_[i]) < -eps * norm(e)) return false;
  }
  return true;
}

bool ConvexPolygon::contains_strictly(Vec2 p, double eps) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
    if (cross(e, p - vertices_[i]) <= eps * norm(e)) return false;
  }
  return true;
}

ConvexPolygon ConvexPolygon::translated(Vec2 t) const {
  std::vector<Vec2> v(vertices_.begin(), vertices_.end());
  for (Vec2& p : v) p += t;
  return ConvexPolygon(Unchecked{}, std::move(v));
}

ConvexPolygon ConvexPolygon::scaled(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("ConvexPolygon::scaled: factor must be positive");
  std::vector<Vec2> v(vertices_.begin(), vertices_.end());
  for (Vec2& p : v) p = p * s;
  return ConvexPolygon(Unchecked{}, std::move(v));
}

double ConvexPolygon::radial_distance(Vec2 u) const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 e = vertices_[(i + 1) % n] - a;
    const Vec2 outward{e.y, -e.x};
    const double denom = dot(outward, u);
    if (denom <= 0.0) continue;
    best = std::min(best, dot(outward, a) / denom);
  }
  return best;
}

// ---------------------------------------------------------------- Triangle

Triangle::Triangle(Vec2 a_, Vec2 b_, Vec2 c_) : a(a_), b(b_), c(c_) {
  const double scale = std::max({norm(b - a), norm(c - a), norm(c - b)});
  if (!(std::fabs(cross(b - a, c - a)) > 1e-14 * scale * scale)) {
    throw std::invalid_argument("Triangle: degenerate (zero area)");
  }
}

// ---------------------------------------------------------------- free functions

double signed_area(std::span<const Vec2> loop) {
  double s = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(loop[i], loop[(i + 1) % n]);
  return 0.5 * s;
}

ConvexPolygon minkowski_sum(const ConvexPolygon& p, const ConvexPolygon& q) {
  auto lowest = [](std::span<const Vec2> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].y < v[best].y || (v[i].y == v[best].y && v[i].x < v[best].x)) best = i;
    }
    return best;
  };
  const auto pv = p.vertices();
  const auto qv = q.vertices();
  const std::size_t n = pv.size();
  const std::size_t m = qv.size();
  const std::size_t i0 = lowest(pv);
  const std::size_t j0 = lowest(qv);

  std::vector<Vec2> out;
  out.reserve(n + m);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    out.push_back(pv[(i0 + i) % n] + qv[(j0 + j) % m]);
    const Vec2 ep = pv[(i0 + i + 1) % n] - pv[(i0 + i) % n];
    const Vec2 eq = qv[(j0 + j + 1) % m] - qv[(j0 + j) % m];
    if (i == n) {
      ++j;
    } else if (j == m) {
      ++i;
    } else {
      const double c = cross(ep, eq);
      if (c > 0.0) {
        ++i;
      } else if (c < 0.0) {
        ++j;
      } else {
        ++i;
        ++j;
      }
    }
  }
  return ConvexPolygon(std::move(out));
}

ConvexPolygon difference_set(const Rect& r, const Rect& r2) {
  return minkowski_sum(r.polygon(), r2.polygon());
}

BoundingSides bounding_rect_hat(const Rect& r, const Rect& r2) {
  const double w = r2.angle() - r.angle();
  const double c = std::fabs(std::cos(w));
  const double s = std::fabs(std::sin(w));
  return {r.length() + r2.length() * c + r2.width() * s, r.width() + r2.length() * s + r2.width() * c};
}

double area_lower_bound(const Rect& r, const Rect& r2) {
  const double w = r2.angle() - r.angle();
  return std::max(r.width() * r2.length() * std::fabs(std::cos(w)),
                  r.length() * r2.length() * std::fabs(std::sin(w)));
}

bool scaled_contains(const Rect& r, double alpha, const ConvexPolygon& p, double rel_eps) {
  if (!(alpha > 0.0)) throw std::invalid_argument("scaled_contains: alpha must be positive");
  const double limit = alpha * (1.0 + rel_eps);
  for (const Vec2& v : p.vertices()) {
    const Vec2 c = r.normalized_coords(v);
    if (std::fabs(c.x) > limit || std::fabs(c.y) > limit) return false;
  }
  return true;
}

namespace {

// Sutherland-Hodgman against a convex counterclockwise clip loop.
std::vector<Vec2> clip_loop(std::span<const Vec2> subject, std::span<const Vec2> clipper) {
  std::vector<Vec2> cur(subject.begin(), subject.end());
  std::vector<Vec2> next;
  const std::size_t m = clipper.size();
  for (std::size_t e = 0; e < m && !cur.empty(); ++e) {
    const Vec2 a = clipper[e];
    const Vec2 d = clipper[(e + 1) % m] - a;
    next.clear();
    const std::size_t n = cur.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 p = cur[i];
      const Vec2 q = cur[(i + 1) % n];
      const double sp = cross(d, p - a);
      const double sq = cross(d, q - a);
      if (sp >= 0.0) next.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        next.push_back(p + (q - p) * t);
      }
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace

std::optional<ConvexPolygon> clip(const ConvexPolygon& p, const ConvexPolygon& q) {
  if (!p.bounding_box().overlaps(q.bounding_box())) return std::nullopt;
  auto loop = clip_loop(p.vertices(), q.vertices());
  if (loop.size() < 3) return std::nullopt;
  return ConvexPolygon::try_make(std::move(loop));
}

double intersection_area(std::span<const Vec2> p, std::span<const Vec2> q) {
  const auto loop = clip_loop(p, q);
  if (loop.size() < 3) return 0.0;
  return std::max(0.0, signed_area(loop));
}

ConvexPolygon circumscribed_polygon(double radius, int sides, Vec2 center) {
  if (sides < 3 || !(radius > 0.0)) {
    throw std::invalid_argument("circumscribed_polygon: need >= 3 sides and positive radius");
  }
  const double r = radius / std::cos(kPi / sides);
  std::vector<Vec2> v;
  v.reserve(sides);
  for (int i = 0; i < sides; ++i) {
    const double t = 2.0 * kPi * i / sides;
    v.push_back(center + Vec2{r * std::cos(t), r * std::sin(t)});
  }
  return ConvexPolygon(std::move(v));
}

}  // namespace perronlab
