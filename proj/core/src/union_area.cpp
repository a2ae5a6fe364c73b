#include "perronlab/union_area.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "perronlab/parallel.hpp"

namespace perronlab {

namespace {

constexpr double kEventMerge = 1e-12;

void sort_unique(std::vector<double>& v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) {
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  v.swap(out);
}

struct Interval {
  double lo;
  double hi;
  int lo_id;  // identifies the endpoint line, used by union_decompose
  int hi_id;
};

// Merges intervals (sorted in place) and returns total covered length.
double merged_length(std::vector<Interval>& iv) {
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double total = 0.0;
  double cur_lo = 0.0;
  double cur_hi = 0.0;
  bool open = false;
  for (const Interval& s : iv) {
    if (s.hi <= s.lo) continue;
    if (!open) {
      cur_lo = s.lo;
      cur_hi = s.hi;
      open = true;
    } else if (s.lo <= cur_hi) {
      cur_hi = std::max(cur_hi, s.hi);
    } else {
      total += cur_hi - cur_lo;
      cur_lo = s.lo;
      cur_hi = s.hi;
    }
  }
  if (open) total += cur_hi - cur_lo;
  return total;
}

Box piece_box(const SlabPiece& p) {
  return {std::min(p.left_lo, p.left_hi), p.y_lo, std::max(p.right_lo, p.right_hi), p.y_hi};
}

// Heights at which the union of pieces can change its combinatorial structure.
std::vector<double> sweep_events(std::span<const SlabPiece> pieces) {
  std::vector<double> ev;
  ev.reserve(2 * pieces.size());
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (const SlabPiece& p : pieces) {
    ev.push_back(p.y_lo);
    ev.push_back(p.y_hi);
    y_min = std::min(y_min, p.y_lo);
    y_max = std::max(y_max, p.y_hi);
  }
  std::vector<Box> boxes;
  boxes.reserve(pieces.size());
  for (const SlabPiece& p : pieces) boxes.push_back(piece_box(p));

  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      const Box& bi = boxes[i];
      const Box& bj = boxes[j];
      if (bi.x1 < bj.x0 || bj.x1 < bi.x0) continue;
      const double lo = std::max(pieces[i].y_lo, pieces[j].y_lo);
      const double hi = std::min(pieces[i].y_hi, pieces[j].y_hi);
      if (!(hi > lo)) continue;
      const double ai[2] = {pieces[i].left_at(lo), pieces[i].right_at(lo)};
      const double bi_[2] = {pieces[i].left_at(hi), pieces[i].right_at(hi)};
      const double aj[2] = {pieces[j].left_at(lo), pieces[j].right_at(lo)};
      const double bj_[2] = {pieces[j].left_at(hi), pieces[j].right_at(hi)};
      for (int s = 0; s < 2; ++s) {
        for (int t = 0; t < 2; ++t) {
          const double d0 = ai[s] - aj[t];
          const double d1 = bi_[s] - bj_[t];
          if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
            ev.push_back(lo + (hi - lo) * d0 / (d0 - d1));
          }
        }
      }
    }
  }
  sort_unique(ev, kEventMerge * (y_max - y_min));
  return ev;
}

}  // namespace

std::optional<std::pair<double, double>> horizontal_slice(const ConvexPolygon& p, double y) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const auto v = p.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = v[i];
    const Vec2 b = v[(i + 1) % n];
    if (y < std::min(a.y, b.y) || y > std::max(a.y, b.y)) continue;
    if (a.y == b.y) {
      lo = std::min({lo, a.x, b.x});
      hi = std::max({hi, a.x, b.x});
    } else {
      const double x = a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!(hi >= lo)) return std::nullopt;
  return std::make_pair(lo, hi);
}

std::vector<SlabPiece> to_slab_pieces(const ConvexPolygon& p) {
  std::vector<double> ys;
  for (const Vec2& v : p.vertices()) ys.push_back(v.y);
  sort_unique(ys, 0.0);
  std::vector<SlabPiece> out;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    const auto lo = horizontal_slice(p, ys[i]);
    const auto hi = horizontal_slice(p, ys[i + 1]);
    if (!lo || !hi) continue;
    // At a vertex height the slice of the neighbouring band is the limit of
    // the band's interior slices, which for a convex polygon equals the slice.
    out.push_back({ys[i], ys[i + 1], lo->first, hi->first, lo->second, hi->second});
  }
  return out;
}

double union_area_pieces(std::span<const SlabPiece> pieces) {
  for (const SlabPiece& p : pieces) {
    if (!(p.y_hi > p.y_lo)) throw std::invalid_argument("union_area_pieces: empty slab piece");
  }
  if (pieces.empty()) return 0.0;
  const std::vector<double> ev = sweep_events(pieces);
  std::vector<Interval> iv;
  double area = 0.0;
  for (std::size_t e = 0; e + 1 < ev.size(); ++e) {
    const double ya = ev[e];
    const double yb = ev[e + 1];
    const double ym = 0.5 * (ya + yb);
    iv.clear();
    for (const SlabPiece& p : pieces) {
      if (p.y_lo <= ym && ym <= p.y_hi) iv.push_back({p.left_at(ym), p.right_at(ym), 0, 0});
    }
    area += (yb - ya) * merged_length(iv);
  }
  return area;
}

std::vector<ConvexPolygon> union_decompose(std::span<const SlabPiece> pieces) {
  std::vector<ConvexPolygon> out;
  if (pieces.empty()) return out;
  const std::vector<double> ev = sweep_events(pieces);

  struct Open {
    double y_lo;
    double l_lo;
    double r_lo;
    double y_hi;
    double l_hi;
    double r_hi;
  };
  auto line_at = [&](int id, double y) {
    const SlabPiece& p = pieces[static_cast<std::size_t>(id / 2)];
    return (id % 2 == 0) ? p.left_at(y) : p.right_at(y);
  };
  auto emit = [&](const Open& o) {
    auto poly = ConvexPolygon::try_make(
        {{o.l_lo, o.y_lo}, {o.r_lo, o.y_lo}, {o.r_hi, o.y_hi}, {o.l_hi, o.y_hi}});
    if (poly) out.push_back(std::move(*poly));
  };

  std::map<std::pair<int, int>, Open> open;
  std::vector<Interval> iv;
  for (std::size_t e = 0; e + 1 < ev.size(); ++e) {
    const double ya = ev[e];
    const double yb = ev[e + 1];
    const double ym = 0.5 * (ya + yb);
    iv.clear();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const SlabPiece& p = pieces[i];
      if (p.y_lo <= ym && ym <= p.y_hi) {
        iv.push_back({p.left_at(ym), p.right_at(ym), static_cast<int>(2 * i), static_cast<int>(2 * i + 1)});
      }
    }
    std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

    std::map<std::pair<int, int>, Open> next;
    std::size_t k = 0;
    while (k < iv.size()) {
      Interval comp = iv[k++];
      while (k < iv.size() && iv[k].lo <= comp.hi) {
        if (iv[k].hi > comp.hi) {
          comp.hi = iv[k].hi;
          comp.hi_id = iv[k].hi_id;
        }
        ++k;
      }
      const std::pair<int, int> key{comp.lo_id, comp.hi_id};
      auto it = open.find(key);
      Open o;
      if (it != open.end()) {
        o = it->second;
        open.erase(it);
      } else {
        o = {ya, line_at(comp.lo_id, ya), line_at(comp.hi_id, ya), 0.0, 0.0, 0.0};
      }
      o.y_hi = yb;
      o.l_hi = line_at(comp.lo_id, yb);
      o.r_hi = line_at(comp.hi_id, yb);
      next.emplace(key, o);
    }
    for (const auto& [key, o] : open) emit(o);
    open.swap(next);
  }
  for (const auto& [key, o] : open) emit(o);
  return out;
}

SlabPiece axis_triangle_piece(const Triangle& t) {
  constexpr double tol = 1e-12;
  std::array<Vec2, 3> v{t.a, t.b, t.c};
  std::vector<Vec2> base;
  std::vector<Vec2> apex;
  for (const Vec2& p : v) {
    if (std::fabs(p.y) <= tol) {
      base.push_back(p);
    } else if (std::fabs(p.y - 1.0) <= tol) {
      apex.push_back(p);
    }
  }
  if (base.size() != 2 || apex.size() != 1) {
    throw std::invalid_argument("union_area_triangles: triangle needs its base on y=0 and apex on y=1");
  }
  const double l = std::min(base[0].x, base[1].x);
  const double r = std::max(base[0].x, base[1].x);
  return {0.0, 1.0, l, apex[0].x, r, apex[0].x};
}

double union_area_triangles(std::span<const Triangle> ts) {
  std::vector<SlabPiece> pieces;
  pieces.reserve(ts.size());
  for (const Triangle& t : ts) pieces.push_back(axis_triangle_piece(t));
  return union_area_pieces(pieces);
}

double union_area_star(std::span<const ConvexPolygon> ps) {
  for (const ConvexPolygon& p : ps) {
    if (!p.contains_strictly({0.0, 0.0}, 0.0)) {
      throw std::invalid_argument("union_area_star: every polygon must contain the origin in its interior");
    }
  }
  if (ps.empty()) return 0.0;

  // Drop polygons covered by another one; identical copies keep the first.
  auto inside = [](const ConvexPolygon& a, const ConvexPolygon& b) {
    const Box bb = b.bounding_box();
    const double eps = 1e-13 * std::max(bb.width(), bb.height());
    for (const Vec2& v : a.vertices()) {
      if (!b.contains(v, eps)) return false;
    }
    return true;
  };
  std::vector<const ConvexPolygon*> kept;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    bool covered = false;
    for (std::size_t j = 0; j < ps.size() && !covered; ++j) {
      if (j == i) continue;
      if (inside(ps[i], ps[j]) && (j < i || !inside(ps[j], ps[i]))) covered = true;
    }
    if (!covered) kept.push_back(&ps[i]);
  }

  std::vector<double> angles = {-kPi, -0.5 * kPi, 0.0, 0.5 * kPi};
  for (const ConvexPolygon* p : kept) {
    for (const Vec2& v : p->vertices()) angles.push_back(std::atan2(v.y, v.x));
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Box bi = kept[i]->bounding_box();
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (!bi.overlaps(kept[j]->bounding_box())) continue;
      const auto vi = kept[i]->vertices();
      const auto vj = kept[j]->vertices();
      for (std::size_t a = 0; a < vi.size(); ++a) {
        const Vec2 p0 = vi[a];
        const Vec2 d1 = vi[(a + 1) % vi.size()] - p0;
        for (std::size_t b = 0; b < vj.size(); ++b) {
          const Vec2 q0 = vj[b];
          const Vec2 d2 = vj[(b + 1) % vj.size()] - q0;
          const double den = cross(d1, d2);
          if (den == 0.0) continue;
          const double t = cross(q0 - p0, d2) / den;
          const double u = cross(q0 - p0, d1) / den;
          if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) continue;
          const Vec2 x = p0 + d1 * t;
          angles.push_back(std::atan2(x.y, x.x));
        }
      }
    }
  }
  for (double& a : angles) {
    if (a >= kPi) a -= 2.0 * kPi;
  }
  sort_unique(angles, 1e-13);

  double area = 0.0;
  const std::size_t n = angles.size();
  for (std::size_t e = 0; e < n; ++e) {
    const double a0 = angles[e];
    const double a1 = (e + 1 < n) ? angles[e + 1] : angles[0] + 2.0 * kPi;
    if (!(a1 > a0)) continue;
    const double am = 0.5 * (a0 + a1);
    const Vec2 um{std::cos(am), std::sin(am)};
    const ConvexPolygon* best = kept[0];
    double best_r = -1.0;
    for (const ConvexPolygon* p : kept) {
      const double r = p->radial_distance(um);
      if (r > best_r) {
        best_r = r;
        best = p;
      }
    }
    const Vec2 u0{std::cos(a0), std::sin(a0)};
    const Vec2 u1{std::cos(a1), std::sin(a1)};
    area += 0.5 * cross(u0 * best->radial_distance(u0), u1 * best->radial_distance(u1));
  }
  return area;
}

GridEstimate union_area_grid(std::span<const ConvexPolygon> ps, const Box& window, int n) {
  if (n < 64) throw std::invalid_argument("union_area_grid: resolution must be at least 64");
  if (!(window.width() > 0.0) || !(window.height() > 0.0)) {
    throw std::invalid_argument("union_area_grid: empty window");
  }
  double boundary = 0.0;
  for (const ConvexPolygon& p : ps) {
    if (!window.contains(p.bounding_box(), 0.0)) {
      throw std::invalid_argument("union_area_grid: window too small for the polygons");
    }
    boundary += p.perimeter();
  }
  const double hx = window.width() / n;
  const double hy = window.height() / n;
  std::vector<long long> row_count(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const double y = window.y0 + (static_cast<double>(row) + 0.5) * hy;
    std::vector<Interval> iv;
    for (const ConvexPolygon& p : ps) {
      if (auto s = horizontal_slice(p, y)) iv.push_back({s->first, s->second, 0, 0});
    }
    std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    long long count = 0;
    std::size_t k = 0;
    while (k < iv.size()) {
      double lo = iv[k].lo;
      double hi = iv[k].hi;
      ++k;
      while (k < iv.size() && iv[k].lo <= hi) hi = std::max(hi, iv[k++].hi);
      const long long first = static_cast<long long>(std::ceil((lo - window.x0) / hx - 0.5));
      const long long last = static_cast<long long>(std::floor((hi - window.x0) / hx - 0.5));
      const long long a = std::max(first, 0LL);
      const long long b = std::min(last, static_cast<long long>(n) - 1);
      if (b >= a) count += b - a + 1;
    }
    row_count[row] = count;
  });
  const long long total = std::accumulate(row_count.begin(), row_count.end(), 0LL);
  return {static_cast<double>(total) * hx * hy, boundary * std::hypot(hx, hy)};
}

}  // namespace perronlab
