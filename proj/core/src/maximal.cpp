#include "perronlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "perronlab/parallel.hpp"
#include "perronlab/union_area.hpp"

namespace perronlab {

namespace {

Box pieces_box(std::span<const SlabPiece> pieces) {
  Box b{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const SlabPiece& p : pieces) {
    b = b.merged({std::min(p.left_lo, p.left_hi), p.y_lo, std::max(p.right_lo, p.right_hi), p.y_hi});
  }
  return b;
}

RectSequence prefix_of(const RectSequence& seq, std::size_t horizon) {
  if (horizon == 0 || horizon > seq.size()) throw std::invalid_argument("horizon must be in [1, sequence length]");
  RectSequence out;
  out.source = seq.source;
  out.rects.assign(seq.rects.begin(), seq.rects.begin() + static_cast<std::ptrdiff_t>(horizon));
  return out;
}

RectSequence scaled_to(RectSequence seq, double scale) {
  double d = 0.0;
  for (const Rect& r : seq.rects) d = std::max(d, r.diameter());
  return seq.scaled(scale / d);
}

}  // namespace

void check_thm2_hypotheses(const SlopeSequence& b, const Thm2Config& config, double& c_star, double& G) {
  if (b.size() < 4) throw HypothesisError("slope prefix too short to test the hypotheses");
  c_star = technical_constant(b, b.size() - 1).value;
  G = perron_factor(b, perron_horizon(b)).value;
  std::ostringstream why;
  if (!(c_star >= config.c_floor)) {
    why << "technical constant c* = " << c_star << " is below " << config.c_floor
        << " on the prefix: (1 + b_{k-1}^2)/(b_k - b_{k-1})^2 is not bounded away from 0";
  } else if (!(G <= config.growth_cap)) {
    why << "Perron factor estimate G = " << G << " exceeds " << config.growth_cap
        << ": the ratios (b_{n+2l} - b_{n+l})/(b_{n+l} - b_n) are not bounded";
  }
  if (!why.str().empty()) throw HypothesisError(why.str());
}

std::pair<double, double> thm2_areas(const SlopeSequence& b, const PerronBlock& block) {
  std::vector<SlabPiece> k_pieces, v_pieces;
  for (std::size_t i = 0; i < block.count(); ++i) {
    const std::size_t k = block.first + i;
    const double t = block.translations[i];
    k_pieces.push_back(axis_triangle_piece(Triangle({t, 1.0}, {b[k - 1] + t, 0.0}, {b[k] + t, 0.0})));
    v_pieces.push_back(trapezium_piece(b[k - 1], b[k], t));
  }
  return {union_area_pieces(v_pieces), union_area_pieces(k_pieces)};
}

Thm2Result thm2_experiment(const SlopeSequence& b, const Thm2Config& config) {
  if (config.n_lo > config.n_hi) throw std::invalid_argument("thm2_experiment: empty block range");
  if (config.n_hi > 20 || (std::size_t{2} << config.n_hi) > b.size()) {
    throw std::out_of_range("thm2_experiment: slope prefix too short for the block range");
  }
  Thm2Result res;
  check_thm2_hypotheses(b, config, res.c_star, res.G);
  res.t0 = std::min(std::sqrt(res.c_star), 1.0) / 72.0;

  const std::vector<double> delta = delta_sequence(config.delta_rule, config.n_hi + 1);
  const RectProcess proc = assemble_process(b, delta, 1.0);
  res.admissible = proc.admissible;
  res.warning = proc.warning;
  if (!proc.admissible && res.warning.empty()) {
    res.warning = "delta rule does not give decreasing block diameters: the process is not admissible";
  }
  const std::vector<PerronBlock> blocks = build_blocks(b, config.n_lo, config.n_hi, config.schedule);

  res.sound = true;
  for (const PerronBlock& blk : blocks) {
    const double d = delta[blk.n];
    ExperimentRow row;
    row.n = blk.n;
    row.t0 = res.t0;
    row.eps_n = blk.eps_measured;
    row.eps_bound = blk.eps_bound;

    std::vector<SlabPiece> k_pieces, v_pieces;
    std::vector<Rect> rects;
    for (std::size_t i = 0; i < blk.count(); ++i) {
      const std::size_t k = blk.first + i;
      const double t = blk.translations[i];
      k_pieces.push_back(axis_triangle_piece(Triangle({t, 1.0}, {b[k - 1] + t, 0.0}, {b[k] + t, 0.0})).scaled(d));
      v_pieces.push_back(trapezium_piece(b[k - 1], b[k], t).scaled(d));
      rects.push_back(proc.rects[k - 1]);
    }
    row.kernels = rects.size();
    row.area_k = union_area_pieces(k_pieces);
    row.area_v = union_area_pieces(v_pieces);
    row.ratio_floor = row.area_v / row.area_k;
    row.inv_9eps = 1.0 / (9.0 * row.eps_n);
    row.v_over_union = row.area_v / (d * d * blk.area_original);

    const std::vector<ConvexPolygon> k_parts = union_decompose(k_pieces);
    std::mt19937_64 rng(config.seed + 7919 * blk.n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Pointwise inclusion V^n in {T* >= t0}, by exact clipping.
    row.probe_min_ratio = INFINITY;
    std::vector<Vec2> v_probes;
    for (std::size_t s = 0; s < config.probes; ++s) {
      const SlabPiece& vp = v_pieces[static_cast<std::size_t>(unit(rng) * v_pieces.size()) % v_pieces.size()];
      const double y = vp.y_lo + unit(rng) * (vp.y_hi - vp.y_lo);
      const double l = vp.left_at(y), r = vp.right_at(y);
      v_probes.push_back({l + unit(rng) * (r - l), y});
    }
    std::vector<double> v_ratio(v_probes.size());
    parallel_for(v_probes.size(), [&](std::size_t s) {
      v_ratio[s] = exact_maximal_at(k_parts, rects, v_probes[s]) / res.t0;
    });
    for (double r : v_ratio) row.probe_min_ratio = std::min(row.probe_min_ratio, r);
    if (v_probes.empty()) row.probe_min_ratio = 1.0;

    bool ok = row.ratio_floor >= row.inv_9eps - 1e-9 && row.v_over_union >= 1.0 / 9.0 &&
              row.probe_min_ratio >= 1.0 - 1e-9;

    if (config.raster) {
      const Box k_box = pieces_box(k_pieces);
      const Box window = window_for(k_box, rects).merged(pieces_box(v_pieces));
      const auto rows_needed = rows_for_guard(window, config.resolution, rects);
      if (!rows_needed) {
        throw ResolutionError("thm2_experiment: " + std::to_string(config.resolution) +
                              " columns are too coarse for block " + std::to_string(blk.n));
      }
      const int n_rows = fft_size(std::max(*rows_needed, config.resolution / 4));
      if (n_rows > config.max_rows) {
        throw ResolutionError("thm2_experiment: block " + std::to_string(blk.n) + " needs " +
                              std::to_string(n_rows) + " rows (limit " + std::to_string(config.max_rows) + ")");
      }
      const RasterGrid grid{window, config.resolution, n_rows};
      row.n_cols = grid.n_cols;
      row.n_rows = grid.n_rows;
      const RasterField kf = indicator_field(grid, k_parts);
      const auto [c0, r0] = grid.cell_of({k_box.x0, k_box.y0});
      const auto [c1, r1] = grid.cell_of({k_box.x1, k_box.y1});
      const MaximalOperator op(grid, rects, false, std::array<int, 4>{c0, c1, r0, r1});
      const RasterField t = op.apply(kf);
      const SuperlevelMeasure sl = superlevel_measure(t, res.t0, false);
      row.ratio_measured = sl.measure / row.area_k;
      row.raster_err = sl.err / row.area_k;

      // Raster against exact clipping at cell centres where the field is live.
      std::vector<std::size_t> live;
      for (std::size_t j = 0; j < t.values.size(); ++j) {
        if (t.values[j] > 0.0) live.push_back(j);
      }
      std::vector<std::size_t> picks;
      for (std::size_t s = 0; s < config.probes && !live.empty(); ++s) {
        picks.push_back(live[static_cast<std::size_t>(unit(rng) * live.size()) % live.size()]);
      }
      std::vector<double> excess(picks.size());
      parallel_for(picks.size(), [&](std::size_t s) {
        const std::size_t j = picks[s];
        const int c = static_cast<int>(j % grid.n_cols), r = static_cast<int>(j / grid.n_cols);
        const double exact = exact_maximal_at(k_parts, rects, grid.center(c, r));
        excess[s] = std::fabs(t.values[j] - exact) - t.err[j];
      });
      row.probe_max_excess = excess.empty() ? 0.0 : *std::max_element(excess.begin(), excess.end());
      ok = ok && row.ratio_measured + row.raster_err >= row.ratio_floor && row.probe_max_excess <= 1e-9;
    }
    row.sound = ok;
    res.sound = res.sound && ok;
    res.rows.push_back(row);
  }
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    if (!(res.rows[i].ratio_floor > res.rows[i - 1].ratio_floor)) res.sound = false;
  }
  return res;
}

std::vector<double> correct_normalizers(const RectSequence& seq, double p, std::size_t horizon) {
  const RectSequence prefix = prefix_of(seq, horizon);
  std::vector<double> w(horizon);
  parallel_for(horizon, [&](std::size_t k) {
    w[k] = lp_correct_factor(correct_factor(prefix, k).q_lo, prefix[k].area(), p);
  });
  return w;
}

RasterField corrected_maximal_field(const RasterField& f, const RectSequence& seq, double p, std::size_t horizon) {
  const RectSequence prefix = prefix_of(seq, horizon);
  const MaximalOperator op(f.grid, prefix.rects);
  const std::vector<std::vector<double>> norms{correct_normalizers(prefix, p, horizon)};
  return std::move(op.apply(f, norms, true).front());
}

WeakTypeTester::WeakTypeTester(const RasterGrid& grid, const RectSequence& seq, std::size_t horizon,
                               std::vector<double> ps, double margin)
    : op_(grid, prefix_of(seq, horizon).rects, true), ps_(std::move(ps)), margin_(margin) {
  for (double p : ps_) norms_.push_back(correct_normalizers(seq, p, horizon));
}

WeakTypeReport WeakTypeTester::check(const RasterField& f, std::span<const double> lambdas) const {
  if (!op_.window_covers(f)) {
    throw std::invalid_argument("weak_type_check: support + R_k leaves the window; enlarge it");
  }
  const std::vector<RasterField> fields = op_.apply(f, norms_, true);
  WeakTypeReport rep;
  for (std::size_t s = 0; s < ps_.size(); ++s) {
    const double p = ps_[s];
    const double norm_p = f.lp_norm_p(p);
    for (double lambda : lambdas) {
      if (!(lambda > 0.0)) throw std::invalid_argument("weak_type_check: lambda must be positive");
      const SuperlevelMeasure sl = superlevel_measure(fields[s], lambda, true);
      WeakTypeLine line{p, lambda, sl.measure, sl.err, norm_p / std::pow(lambda, p), false};
      line.pass = line.measured <= line.bound * (1.0 + margin_) + line.err;
      rep.pass = rep.pass && line.pass;
      rep.lines.push_back(line);
    }
  }
  return rep;
}

WeakTypeReport weak_type_check(const RasterField& f, const RectSequence& seq, double p,
                               std::span<const double> lambdas, std::size_t horizon) {
  return WeakTypeTester(f.grid, seq, horizon, {p}).check(f, lambdas);
}

LpGoodFamily lpgood_family(std::span<const double> lambdas, std::size_t K, double chain_alpha) {
  if (lambdas.size() < K + 1) throw std::invalid_argument("lpgood_family: need K + 1 lambdas");
  for (std::size_t k = 0; k <= K; ++k) {
    if (!(lambdas[k] > 0.0) || (k > 0 && !(lambdas[k] < lambdas[k - 1]))) {
      throw std::invalid_argument("lpgood_family: lambdas must be positive and strictly decreasing");
    }
  }
  LpGoodFamily fam;
  fam.chain_alpha = chain_alpha;
  fam.seq.source = "lpgood";
  for (std::size_t k = 0; k <= K; ++k) {
    fam.block_start.push_back(fam.seq.size());
    const double l = lambdas[k];
    for (std::size_t i = 0; i <= k; ++i) {
      const double w = std::ldexp(l, -static_cast<int>(i));
      const double h = std::ldexp(l, static_cast<int>(i) - static_cast<int>(k));
      fam.seq.rects.push_back(Rect::from_sides(w, h, 0.0));
    }
  }
  for (std::size_t k = 0; k <= K; ++k) {
    const double l = lambdas[k];
    for (std::size_t i = 0; i <= k; ++i) {
      for (std::size_t j = i + 1; j <= k; ++j) {
        const int ii = static_cast<int>(i), jj = static_cast<int>(j), kk = static_cast<int>(k);
        LpGoodPair pr{k, i, j, 0.0, 0.0, 0.0};
        pr.formula = (std::ldexp(1.0, -ii) + std::ldexp(1.0, -jj)) * (std::ldexp(1.0, ii - kk) + std::ldexp(1.0, jj - kk)) * l * l;
        const Rect& ri = fam.seq[fam.block_start[k] + i];
        pr.measured = difference_set(ri, fam.seq[fam.block_start[k] + j]).area();
        pr.ratio = pr.measured / ri.area();
        fam.max_formula_err = std::max(fam.max_formula_err, std::fabs(pr.measured - pr.formula) / pr.formula);
        if (pr.ratio < std::ldexp(1.0, jj - ii) * (1.0 - 1e-12)) fam.witness_holds = false;
        fam.pairs.push_back(pr);
      }
    }
  }
  fam.chains.resize(K + 1);
  parallel_for(K + 1, [&](std::size_t k) {
    const std::size_t end = k == K ? fam.seq.size() : fam.block_start[k + 1];
    fam.chains[k] = decompose_almost_nested(prefix_of(fam.seq, end), chain_alpha).size();
  });
  return fam;
}

RectSequence nested_similar_family(std::size_t count, double scale) {
  RectSequence seq;
  seq.source = "nested-similar";
  for (std::size_t k = 0; k < count; ++k) seq.rects.push_back(Rect::from_sides(2.0, 1.0, 0.3).scaled(std::ldexp(1.0, -static_cast<int>(k))));
  return scaled_to(seq, scale);
}

RectSequence thm2_prefix_family(std::size_t blocks, double scale) {
  const SlopeSequence b = SlopeSequence::power(1.0, (std::size_t{1} << blocks) + 1);
  std::vector<double> delta;
  for (std::size_t n = 0; n < blocks; ++n) delta.push_back(std::ldexp(1.0, -static_cast<int>(n)));
  RectSequence seq = assemble_process(b, delta, INFINITY).rects;
  seq.source = "thm2-prefix";
  return scaled_to(seq, scale);
}

RectSequence lpgood_prefix_family(std::size_t blocks, double scale) {
  std::vector<double> lambdas;
  for (std::size_t k = 0; k < blocks; ++k) lambdas.push_back(1.0 / static_cast<double>(k + 1));
  RectSequence seq = lpgood_family(lambdas, blocks - 1).seq;
  seq.source = "lpgood-prefix";
  return scaled_to(seq, scale);
}

RectSequence weak_type_family(const std::string& name) {
  if (name == "nested-similar") return nested_similar_family(5, 1.0);
  if (name == "thm2-prefix") return thm2_prefix_family(3, 1.0);
  if (name == "lpgood-prefix") return lpgood_prefix_family(3, 1.0);
  throw std::invalid_argument("unknown weak-type family '" + name + "'");
}

RasterField random_simple_function(std::mt19937_64& rng, const RasterGrid& grid, const Box& support, int count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double sw = support.x1 - support.x0, sh = support.y1 - support.y0;
  std::vector<ConvexPolygon> sets;
  std::vector<double> coeffs;
  for (int i = 0; i < count; ++i) {
    const double w = sw * (0.033 + 0.4 * u(rng)), h = sh * (0.033 + 0.4 * u(rng));
    const double x = support.x0 + (sw - w) * u(rng), y = support.y0 + (sh - h) * u(rng);
    sets.push_back(ConvexPolygon({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}));
    coeffs.push_back(0.2 + 0.8 * u(rng));
  }
  return simple_function_field(grid, sets, coeffs);
}

std::vector<WeakTypeFamilyResult> weak_type_experiment(const WeakTypeConfig& config) {
  const Box support{-0.75, -0.75, 0.75, 0.75};
  std::vector<WeakTypeFamilyResult> out;
  for (const std::string& name : config.families) {
    const RectSequence seq = weak_type_family(name);
    const Box window = window_for(support, seq.rects);
    const auto rows = rows_for_guard(window, config.resolution, seq.rects);
    if (!rows) {
      throw ResolutionError("weak-type family " + name + ": " + std::to_string(config.resolution) +
                            " columns are too coarse for its thinnest rectangle");
    }
    const RasterGrid grid{window, config.resolution, fft_size(std::max(config.resolution, *rows))};
    const WeakTypeTester tester(grid, seq, seq.size(), config.ps, config.margin);
    WeakTypeFamilyResult res;
    res.family = name;
    res.terms = seq.size();
    res.n_cols = grid.n_cols;
    res.n_rows = grid.n_rows;
    for (std::size_t i = 0; i < config.functions; ++i) {
      std::seed_seq ss{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                       static_cast<std::uint32_t>(i)};
      std::mt19937_64 rng(ss);
      WeakTypeReport rep = tester.check(random_simple_function(rng, grid, support, config.pieces), config.lambdas);
      for (const WeakTypeLine& l : rep.lines) {
        res.worst_slack = std::max(res.worst_slack, l.measured / (l.bound * (1.0 + config.margin) + l.err));
      }
      res.pass = res.pass && rep.pass;
      res.reports.push_back(std::move(rep));
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace perronlab
