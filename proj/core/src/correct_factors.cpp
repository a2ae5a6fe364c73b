#include "perronlab/correct_factors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "perronlab/parallel.hpp"
#include "perronlab/union_area.hpp"

namespace perronlab {

RectSequence RectSequence::scaled(double s) const {
  RectSequence out;
  out.source = source;
  out.rects.reserve(rects.size());
  for (const Rect& r : rects) out.rects.push_back(r.scaled(s));
  if (decay_witness) out.decay_witness = *decay_witness * s;
  return out;
}

bool RectSequence::diameters_non_increasing() const {
  for (std::size_t i = 1; i < rects.size(); ++i) {
    if (rects[i].diameter() > rects[i - 1].diameter() * (1.0 + 1e-12)) return false;
  }
  return true;
}

bool RectSequence::lengths_non_increasing() const {
  for (std::size_t i = 1; i < rects.size(); ++i) {
    if (rects[i].length() > rects[i - 1].length() * (1.0 + 1e-12)) return false;
  }
  return true;
}

CorrectFactor correct_factor(const RectSequence& seq, std::size_t k, const TailPolicy& tail) {
  if (k >= seq.size()) throw std::out_of_range("correct_factor: index past the stored prefix");
  const std::size_t last = seq.size() - 1;
  const std::size_t l_max = std::min(tail.l_max.value_or(last), last);
  if (l_max < k) throw std::invalid_argument("correct_factor: l_max precedes k");

  std::vector<ConvexPolygon> parts;
  parts.reserve(l_max - k + 2);
  for (std::size_t l = k; l <= l_max; ++l) parts.push_back(difference_set(seq[k], seq[l]));
  CorrectFactor out;
  out.q_lo = union_area_star(parts);

  double d_max = 0.0;
  for (std::size_t l = l_max + 1; l <= last; ++l) d_max = std::max(d_max, 0.5 * seq[l].diameter());
  if (!tail.finite) {
    if (!seq.decay_witness) {
      out.q_hi = std::numeric_limits<double>::infinity();
      out.tail_bounded = false;
      return out;
    }
    d_max = std::max(d_max, *seq.decay_witness);
  }
  if (d_max <= 0.0) {
    out.q_hi = out.q_lo;
    return out;
  }
  parts.push_back(minkowski_sum(seq[k].polygon(), circumscribed_polygon(d_max, tail.disk_sides)));
  out.q_hi = std::max(out.q_lo, union_area_star(parts));
  return out;
}

double lp_correct_factor(double q, double rect_area, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_correct_factor: p must be >= 1");
  if (!(q > 0.0) || !(rect_area > 0.0)) {
    throw std::invalid_argument("lp_correct_factor: q and |R| must be positive");
  }
  if (p == 1.0) return q;
  return std::pow(q, 1.0 / p) * std::pow(rect_area, 1.0 - 1.0 / p);
}

double min_nesting_alpha(const Rect& r_k, const Rect& r_l) {
  // Vertices of the difference polygon are corner sums; scanning all 16 in
  // r_k's frame gives the same maximum as the reduced polygon.
  const auto ck = r_k.corners();
  const auto cl = r_l.corners();
  double alpha = 0.0;
  for (const Vec2& a : ck) {
    for (const Vec2& b : cl) {
      const Vec2 c = r_k.normalized_coords(a + b);
      alpha = std::max({alpha, std::fabs(c.x), std::fabs(c.y)});
    }
  }
  return alpha;
}

NestingReport almost_nested_alpha(const RectSequence& seq, std::size_t horizon) {
  if (horizon > seq.size()) throw std::invalid_argument("almost_nested_alpha: horizon past the prefix");
  NestingReport rep;
  if (horizon < 2) return rep;
  // Per-row maxima, reduced in index order.
  std::vector<std::pair<double, std::size_t>> row(horizon, {0.0, 0});
  parallel_for(horizon, [&](std::size_t k) {
    double best = -1.0;
    std::size_t arg = k;
    for (std::size_t l = k; l < horizon; ++l) {
      const double a = min_nesting_alpha(seq[k], seq[l]);
      if (a > best) {
        best = a;
        arg = l;
      }
    }
    row[k] = {best, arg};
  });
  double best = -1.0;
  for (std::size_t k = 0; k < horizon; ++k) {
    if (row[k].first > best) {
      best = row[k].first;
      rep.k = k;
      rep.l = row[k].second;
    }
  }
  rep.alpha = best;
  return rep;
}

GrowthVerdict linear_growth_constant(const RectSequence& seq, std::size_t horizon,
                                     const GrowthOptions& options) {
  if (horizon > seq.size()) throw std::invalid_argument("linear_growth_constant: horizon past the prefix");
  GrowthVerdict v;
  v.horizon = horizon;
  std::vector<CorrectFactor> q(horizon);
  parallel_for(horizon, [&](std::size_t k) { q[k] = correct_factor(seq, k, options.tail); });

  bool bounded = true;
  for (std::size_t k = 0; k < horizon; ++k) {
    if (!q[k].tail_bounded) bounded = false;
    const double ratio = q[k].q_hi / seq[k].area();
    if (ratio > v.constant) {
      v.constant = ratio;
      v.argmax_k = k;
    }
  }

  const std::size_t last = options.tail.l_max.value_or(seq.size() - 1);
  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t l = k; l <= std::min(last, seq.size() - 1); ++l) {
      const double ratio = difference_set(seq[k], seq[l]).area() / seq[k].area();
      if (ratio > v.witness_ratio) {
        v.witness_ratio = ratio;
        v.witness_k = k;
        v.witness_l = l;
      }
    }
  }
  v.kind = (!bounded || v.constant > options.growth_cap) ? GrowthVerdict::Kind::Unbounded
                                                          : GrowthVerdict::Kind::Linear;
  return v;
}

LemmaLinearReport lemma_linear_check(const RectSequence& seq, std::size_t horizon) {
  if (horizon == 0 || horizon > seq.size()) throw std::invalid_argument("lemma_linear_check: bad horizon");
  RectSequence prefix;
  prefix.rects.assign(seq.rects.begin(), seq.rects.begin() + static_cast<std::ptrdiff_t>(horizon));
  prefix.source = seq.source;

  LemmaLinearReport rep;
  rep.premise_holds = prefix.lengths_non_increasing();
  std::vector<double> q(horizon);
  parallel_for(horizon, [&](std::size_t k) { q[k] = correct_factor(prefix, k).q_lo; });
  for (std::size_t k = 0; k < horizon; ++k) rep.growth_constant = std::max(rep.growth_constant, q[k] / prefix[k].area());

  const NestingReport nest = almost_nested_alpha(prefix, horizon);
  rep.alpha_star = nest.alpha.value_or(2.0);  // a single term has only R - R = 2R
  rep.alpha_bound_holds = rep.alpha_star <= rep.growth_constant + 2.0 + 1e-9;

  const double a2 = rep.alpha_star * rep.alpha_star;
  for (std::size_t k = 0; k < horizon; ++k) {
    rep.worst_area_ratio = std::max(rep.worst_area_ratio, q[k] / (a2 * prefix[k].area()));
  }
  rep.area_bound_holds = rep.worst_area_ratio <= 1.0 + 1e-9;
  return rep;
}

std::vector<std::vector<std::size_t>> decompose_almost_nested(const RectSequence& seq, double alpha) {
  for (const Rect& r : seq.rects) {
    if (!r.is_axis_parallel()) throw std::invalid_argument("decompose_almost_nested: rectangles must be axis-parallel");
  }
  std::vector<std::vector<std::size_t>> chains;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    bool placed = false;
    for (auto& chain : chains) {
      const bool fits = std::all_of(chain.begin(), chain.end(), [&](std::size_t j) {
        return min_nesting_alpha(seq[j], seq[k]) <= alpha * (1.0 + kScaleEps);
      });
      if (fits) {
        chain.push_back(k);
        placed = true;
        break;
      }
    }
    if (!placed) chains.push_back({k});
  }
  return chains;
}

}  // namespace perronlab
