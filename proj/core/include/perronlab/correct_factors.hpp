#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "perronlab/geom.hpp"

namespace perronlab {

/// Ordered rectangles R_0, R_1, ... centred at the origin.
///
/// `decay_witness`, when set, bounds diam(R_l)/2 for every term beyond the
/// stored prefix. Without it the prefix is either the whole (finite) sequence
/// or the tail is unknown, depending on the TailPolicy used.
struct RectSequence {
  std::vector<Rect> rects;
  std::string source;
  std::optional<double> decay_witness;

  std::size_t size() const { return rects.size(); }
  bool empty() const { return rects.empty(); }
  const Rect& operator[](std::size_t i) const { return rects[i]; }

  /// Every rectangle scaled by `s` (the witness too).
  RectSequence scaled(double s) const;
  /// True when diam is non-increasing along the prefix.
  bool diameters_non_increasing() const;
  /// True when the long sides are non-increasing along the prefix.
  bool lengths_non_increasing() const;
};

struct TailPolicy {
  /// Last index used in the explicit union; defaults to the last stored term.
  std::optional<std::size_t> l_max;
  /// Treat the stored prefix as the complete sequence (no tail beyond it).
  bool finite = true;
  /// Sides of the polygon circumscribing the tail disk.
  int disk_sides = 64;
};

struct CorrectFactor {
  double q_lo = 0.0;
  double q_hi = 0.0;
  bool tail_bounded = true;  // false: q_hi is +infinity
};

/// Bracket [q_lo, q_hi] for the correct factor Q_k = |U_{l>=k} (R_k - R_l)|.
///
/// q_lo is the union over k <= l <= l_max. Terms past l_max lie in
/// R_k + Disk(d) where d bounds their half-diameters (stored terms past l_max,
/// plus the decay witness when the sequence is not finite); q_hi adds a
/// polygon circumscribing that set to the union.
CorrectFactor correct_factor(const RectSequence& seq, std::size_t k, const TailPolicy& tail = {});

/// W_{k,p} = q^{1/p} |R_k|^{1/p'}; equals q when p = 1. Throws for p < 1.
double lp_correct_factor(double q, double rect_area, double p);

/// Least alpha with R_k - R_l contained in alpha R_k.
double min_nesting_alpha(const Rect& r_k, const Rect& r_l);

struct NestingReport {
  std::optional<double> alpha;  // empty: fewer than two rectangles
  std::size_t k = 0;
  std::size_t l = 0;
};

/// alpha* = max over k <= l < horizon of min_nesting_alpha(R_k, R_l), with the
/// maximising pair. The diagonal contributes R_k - R_k = 2 R_k, so alpha* >= 2.
NestingReport almost_nested_alpha(const RectSequence& seq, std::size_t horizon);

struct GrowthVerdict {
  enum class Kind { Linear, Unbounded };
  Kind kind = Kind::Linear;
  double constant = 0.0;          // max q_hi(k) / |R_k|; +inf when a tail is unbounded
  std::size_t argmax_k = 0;       // index attaining `constant`
  std::size_t witness_k = 0;      // pair with the largest |R_k - R_l| / |R_k|
  std::size_t witness_l = 0;
  double witness_ratio = 0.0;
  std::size_t horizon = 0;
};

struct GrowthOptions {
  TailPolicy tail;
  /// Ratios above this are reported as a growth witness (Unbounded).
  double growth_cap = 64.0;
};

/// Linear-growth constant C = max_{k < horizon} q_hi(k)/|R_k|.
GrowthVerdict linear_growth_constant(const RectSequence& seq, std::size_t horizon,
                                     const GrowthOptions& options = {});

struct LemmaLinearReport {
  double growth_constant = 0.0;  // C over the prefix
  double alpha_star = 0.0;
  bool alpha_bound_holds = false;  // alpha* <= C + 2
  bool area_bound_holds = false;   // Q_k <= alpha*^2 |R_k| for every k
  double worst_area_ratio = 0.0;   // max_k Q_k / (alpha*^2 |R_k|)
  bool premise_holds = false;      // long sides non-increasing on the prefix
};

/// Checks both quantitative directions of the linear-growth / almost-nested
/// equivalence on the first `horizon` terms, treated as a finite sequence.
LemmaLinearReport lemma_linear_check(const RectSequence& seq, std::size_t horizon);

/// First-fit greedy split into chains in which every later member is
/// alpha-nested in all earlier ones. A heuristic: the chain count is an upper
/// bound for the optimal decomposition, not the optimum. Requires
/// axis-parallel rectangles.
std::vector<std::vector<std::size_t>> decompose_almost_nested(const RectSequence& seq, double alpha);

}  // namespace perronlab
