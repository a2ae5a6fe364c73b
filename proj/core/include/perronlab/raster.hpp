#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perronlab/geom.hpp"
#include "perronlab/union_area.hpp"

namespace perronlab {

/// Uniform grid of n_cols x n_rows cells over `window`. Cells may be
/// anisotropic; cell (c, r) spans [x0 + c dx, x0 + (c+1) dx] x [y0 + r dy, ...].
struct RasterGrid {
  Box window;
  int n_cols = 0;
  int n_rows = 0;

  double dx() const { return window.width() / n_cols; }
  double dy() const { return window.height() / n_rows; }
  double cell_area() const { return dx() * dy(); }
  std::size_t size() const { return static_cast<std::size_t>(n_cols) * static_cast<std::size_t>(n_rows); }
  std::size_t index(int c, int r) const { return static_cast<std::size_t>(r) * n_cols + c; }
  Vec2 center(int c, int r) const { return {window.x0 + (c + 0.5) * dx(), window.y0 + (r + 0.5) * dy()}; }
  /// Cell containing `p`, clamped to the grid.
  std::pair<int, int> cell_of(Vec2 p) const;
};

/// Cell-averaged scalar field, row-major with row 0 at the bottom.
///
/// `osc` (input fields) bounds sup f - inf f inside each cell; empty means f is
/// constant on every cell. `err` (output fields) bounds |value - truth| at each
/// cell centre. `exact` marks values that are exact cell averages.
struct RasterField {
  RasterGrid grid;
  std::vector<double> values;
  std::vector<double> osc;
  std::vector<double> err;
  bool exact = true;
  double mass_err = 0.0;  // bound on |sum(values) A - integral|

  static RasterField zeros(const RasterGrid& grid);
  double at(int c, int r) const { return values[grid.index(c, r)]; }
  double mass() const;
  /// Sum of |v|^p over cells, times the cell area.
  double lp_norm_p(double p) const;
  RasterField scaled(double t) const;
};

/// Thrown when a rectangle is too thin for the grid.
class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Minimum width of the rectangle measured in cells (coordinates divided by
/// dx and dy). The guard requires this to be at least 4 sqrt 2, which for
/// square cells is "cell diagonal <= min side / 4".
double cell_width(const RasterGrid& grid, const Rect& r);
constexpr double kMinCellWidth = 5.656854249492381;  // 4 sqrt 2

/// Throws ResolutionError naming the first rectangle that fails the guard.
void check_resolution(const RasterGrid& grid, std::span<const Rect> rects);

/// Smallest n_rows (with n_cols fixed) that passes the guard, or empty when no
/// row count can, because the columns are already too coarse.
std::optional<int> rows_for_guard(const Box& window, int n_cols, std::span<const Rect> rects);

/// Next size of the form 2^a 3^b 5^c 7^d.
int fft_size(int n);

/// Coverage fraction with 4 x 4 supersampling on an n x n grid. `osc` is 1 on
/// every cell touched by a polygon edge; mass_err = boundary length x cell
/// diagonal. Polygons must lie inside the window.
RasterField rasterize(std::span<const ConvexPolygon> polys, const Box& window, int resolution);

/// Exact coverage of a union of pairwise disjoint slab pieces (cells cut by
/// the boundary get their exact area fraction). Pieces must lie inside the
/// window.
std::vector<double> exact_coverage(std::span<const SlabPiece> pieces, const RasterGrid& grid);

/// Exact raster of sum_i coeff_i chi_{S_i} for convex S_i, with osc bounding the
/// in-cell variation by the coefficients of the sets cut by the cell.
RasterField simple_function_field(const RasterGrid& grid, std::span<const ConvexPolygon> sets,
                                  std::span<const double> coeffs);

/// Exact indicator raster of a union of pairwise disjoint convex pieces.
RasterField indicator_field(const RasterGrid& grid, std::span<const ConvexPolygon> disjoint);

/// Discrete maximal operator over a fixed grid and rectangle family.
///
/// For an input field f it returns, at each cell centre x,
///   max_k |int_{x+R_k} f| / norm_k
/// with the integral taken as the cell quadrature sum_c f_c |c n (x+R_k)|.
/// Each correlation runs through an FFT, zero-padded so that the result on
/// the grid is the linear (non-periodic) correlation of f with R_k.
///
/// Error per cell: for exact inputs, a cell cut by both f's and R_k's
/// boundaries contributes at most A osc/4; cells where either is constant are
/// exact. Supersampled inputs use A osc |c n (x+R)|.
class MaximalOperator {
 public:
  /// `support` (cells, inclusive) bounds the non-zero cells of every input;
  /// by default the whole grid. Throws ResolutionError via the guard.
  MaximalOperator(const RasterGrid& grid, std::vector<Rect> rects, bool cache_kernels = false,
                  std::optional<std::array<int, 4>> support = std::nullopt);
  ~MaximalOperator();
  MaximalOperator(MaximalOperator&&) noexcept;
  MaximalOperator& operator=(MaximalOperator&&) noexcept;

  const RasterGrid& grid() const;
  std::span<const Rect> rects() const;
  int padded_cols() const;
  int padded_rows() const;

  /// One output field per normaliser set (each of size rects().size()). The
  /// correlations are shared between the sets.
  std::vector<RasterField> apply(const RasterField& f, std::span<const std::vector<double>> norms,
                                 bool absolute = true) const;
  /// Single normaliser set; defaults to |R_k|.
  RasterField apply(const RasterField& f) const;

  /// True when (support of f) + R_k stays inside the window for every k, so
  /// no part of the superlevel set can fall outside the grid.
  bool window_covers(const RasterField& f) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// max_k |(x + R_k) n K| / |R_k| by exact clipping, K given as disjoint convex
/// pieces.
double exact_maximal_at(std::span<const ConvexPolygon> k_pieces, std::span<const Rect> rects, Vec2 x);

struct SuperlevelMeasure {
  double measure = 0.0;       // cells selected x cell area
  double err = 0.0;           // (boundary or uncertain cells) x cell area
  std::size_t cells = 0;
  std::size_t boundary_cells = 0;
  std::size_t uncertain_cells = 0;  // |value - lambda| <= err
};

/// {v >= lambda} (or v > lambda when `strict`). A cell counts towards the
/// error when its status differs from a 4-neighbour or when its value is
/// within its own error of lambda.
SuperlevelMeasure superlevel_measure(const RasterField& t_field, double lambda, bool strict);

struct SuperlevelRatio {
  double ratio = 0.0;
  double err = 0.0;
};

/// Strict superlevel measure divided by set_area.
SuperlevelRatio superlevel_ratio(const RasterField& t_field, double lambda, double set_area);

/// Window that contains support + R_k for every k, with a relative margin.
Box window_for(const Box& support, std::span<const Rect> rects, double margin = 0.02);

}  // namespace perronlab
