#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perronlab/correct_factors.hpp"
#include "perronlab/geom.hpp"
#include "perronlab/perron.hpp"

namespace perronlab {

/// Companion objects of one triangle Delta = ABC with A = (0,1), B = (b,0),
/// C = (c,0), b < c. B' and C' are the images of B and C under the homothety
/// of ratio 3/2 centred at A.
///
/// P is oriented along the outer edge AC: sides |AC'| and the distance from
/// B' to the line AC'. With this orientation the translate B' + P meets Delta
/// in exactly |P|/72, the extremal corner of the intersection bound.
struct TriangleKit {
  Triangle delta;
  Rect p_rect;            // P, centred at the origin
  ConvexPolygon v_trap;   // V = B C C' B'
  Vec2 b_prime;           // off-axis corner
  Vec2 c_prime;           // on the axis of P
  double alpha_loc = 0.0; // |AC| / |BC|, possibly capped
};

/// Builds the kit for a triangle with apex (0,1) and base [b, c], 0 <= b < c.
/// `alpha_cap`, when set, replaces alpha_loc by min(alpha_loc, cap).
TriangleKit companion_rect(const Triangle& t, std::optional<double> alpha_cap = std::nullopt);

/// Shorthand for the kit of the triangle with base [b, c].
TriangleKit companion_rect(double b, double c, std::optional<double> alpha_cap = std::nullopt);

/// V_k = B C C' B' of a translated triangle, as a slab piece over y in [-1/2, 0].
SlabPiece trapezium_piece(double b, double c, double shift = 0.0);

/// delta_n for n = 0 .. count-1. Rules: "geometric:r" gives r^n,
/// "list:a,b,..." gives the listed values (must be long enough).
std::vector<double> delta_sequence(const std::string& rule, std::size_t count);

struct RectProcess {
  SlopeSequence b;
  std::vector<double> delta;
  RectSequence rects;                  // R_1, R_2, ...; rects[i] is R_{i+1}
  std::vector<double> block_max_diam;  // per block n
  bool admissible = false;
  std::string warning;                 // non-empty when the verdict is vacuous
};

/// R_k = delta_n P_k for 2^n <= k < 2^{n+1}, blocks n = 0 .. delta.size()-1.
/// Admissible when the block maxima of diam R_k strictly decrease from some
/// block on and the last one is below `threshold`.
RectProcess assemble_process(const SlopeSequence& b, const std::vector<double>& delta, double threshold);

struct IntersectionReport {
  double min_ratio = 0.0;  // min |(x+P) n Delta| / |P| over the samples
  Vec2 argmin;
  double bound = 0.0;      // min(alpha_loc, 1) / 72
  double ratio_at_off_axis = 0.0;  // x = B', exactly 1/72
  double ratio_at_on_axis = 0.0;   // x = C', at least min(alpha_loc, 1)/72
  std::size_t samples = 0;
  bool holds = false;      // min_ratio >= bound - 1e-9
};

/// |(x+P) n Delta| / |P| by exact clipping.
double intersection_ratio(const TriangleKit& kit, Vec2 x);

/// Uniform samples in V (B' and C' always included), evaluated in parallel.
/// Requires samples >= 100.
IntersectionReport verify_intersection_bound(const TriangleKit& kit, std::size_t samples, std::uint64_t seed);

}  // namespace perronlab
