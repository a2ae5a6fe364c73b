#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "perronlab/geom.hpp"

namespace perronlab {

/// A horizontal band [y_lo, y_hi] of a planar region whose cross-section at
/// every height is one interval with endpoints linear in y. Translated
/// triangles standing on the axis and the companion trapezia are single pieces;
/// any convex polygon splits into a few of them.
struct SlabPiece {
  double y_lo = 0.0;
  double y_hi = 0.0;
  double left_lo = 0.0;   // left endpoint at y_lo
  double left_hi = 0.0;   // left endpoint at y_hi
  double right_lo = 0.0;  // right endpoint at y_lo
  double right_hi = 0.0;  // right endpoint at y_hi

  double left_at(double y) const { return left_lo + (left_hi - left_lo) * (y - y_lo) / (y_hi - y_lo); }
  double right_at(double y) const { return right_lo + (right_hi - right_lo) * (y - y_lo) / (y_hi - y_lo); }
  double area() const { return 0.5 * (y_hi - y_lo) * ((right_lo - left_lo) + (right_hi - left_hi)); }
  SlabPiece translated(Vec2 t) const {
    return {y_lo + t.y, y_hi + t.y, left_lo + t.x, left_hi + t.x, right_lo + t.x, right_hi + t.x};
  }
  SlabPiece scaled(double s) const {
    return {y_lo * s, y_hi * s, left_lo * s, left_hi * s, right_lo * s, right_hi * s};
  }
};

/// Splits a convex polygon into slab pieces between consecutive vertex heights.
std::vector<SlabPiece> to_slab_pieces(const ConvexPolygon& p);

/// The x-interval cut from a convex polygon by the horizontal line at `y`.
std::optional<std::pair<double, double>> horizontal_slice(const ConvexPolygon& p, double y);

/// Area of a union of convex polygons that all contain the origin.
///
/// Integrates half the squared radial maximum over an angular sweep whose
/// events are every vertex direction and every pairwise edge crossing. Between
/// events one edge of one polygon is outermost, so each interval contributes
/// an exact triangle. Throws std::invalid_argument if a polygon does not
/// contain the origin in its interior.
double union_area_star(std::span<const ConvexPolygon> ps);

/// Area of a union of triangles each having one edge on y = 0 and the third
/// vertex on y = 1. Throws std::invalid_argument for any other placement.
double union_area_triangles(std::span<const Triangle> ts);

/// Area of a union of slab pieces by an exact vertical sweep: between
/// consecutive events (piece limits and pairwise endpoint crossings) the
/// covered length is linear in y and integrates exactly at the midpoint.
double union_area_pieces(std::span<const SlabPiece> pieces);

/// Disjoint trapezoids whose union equals the union of `pieces` (up to
/// measure zero). Consecutive bands are merged while the same endpoint lines
/// bound a component.
std::vector<ConvexPolygon> union_decompose(std::span<const SlabPiece> pieces);

/// Slab piece of a triangle with one edge on y = 0 and apex on y = 1.
SlabPiece axis_triangle_piece(const Triangle& t);

struct GridEstimate {
  double estimate = 0.0;
  double err = 0.0;
};

/// Cell-centre counting estimate of the union area on an n x n grid over
/// `window`. err = (total boundary length) x (cell diagonal) brackets the
/// truth. Requires n >= 64 and every polygon inside the window.
GridEstimate union_area_grid(std::span<const ConvexPolygon> ps, const Box& window, int n);

}  // namespace perronlab
