// Acceptance run: one PASS/FAIL line per criterion. Arguments select a subset
// by number; no arguments runs all nine. Exit status is 1 when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "perronlab/correct_factors.hpp"
#include "perronlab/maximal.hpp"
#include "perronlab/perron.hpp"
#include "perronlab/process.hpp"
#include "perronlab/union_area.hpp"

using namespace perronlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Two triangles sharing an apex, bases [-x, 0] and [0, y]; the merged area
// after the slide is a^2 + (1-a)^2 (x/y + y/x) times the original.
Verdict bisection_identity() {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> len(0.01, 5.0), u(0.0, 1.0), apex(-3.0, 3.0);
  double worst_rel = 0.0, worst_ms = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double x = len(rng), y = len(rng), h = 0.2 + 4.0 * u(rng);
    const double lo = std::max(x, y) / (x + y);
    const double a = lo + (1.0 - lo) * (0.001 + 0.998 * u(rng));
    const Vec2 top{apex(rng), h};
    const auto t0 = Clock::now();
    const BisectionResult r = bisection_step(Triangle(top, {-x, 0}, {0, 0}), Triangle(top, {0, 0}, {y, 0}), a);
    worst_ms = std::max(worst_ms, 1e3 * seconds_since(t0));
    const double predicted = a * a + (1.0 - a) * (1.0 - a) * (x / y + y / x);
    worst_rel = std::max(worst_rel, std::abs(r.measured - predicted) / predicted);
  }
  return {worst_rel <= 1e-9 && worst_ms <= 1.0,
          fmt("500 cases, max relative error %.3g, slowest %.3f ms", worst_rel, worst_ms)};
}

Verdict lemma_1_72() {
  Verdict v;
  double worst_margin = INFINITY, worst_corner = 0.0, slowest = 0.0;
  int kits = 0;
  for (double b : {0.0, 0.5, 1.0, 3.0}) {
    for (double gap : {0.25, 1.0, 2.0}) {
      const auto t0 = Clock::now();
      const TriangleKit kit = companion_rect(b, b + gap);
      const IntersectionReport r = verify_intersection_bound(kit, 10000, 7 + static_cast<std::uint64_t>(kits));
      slowest = std::max(slowest, seconds_since(t0));
      const double bound = std::min(kit.alpha_loc, 1.0) / 72.0;
      worst_margin = std::min(worst_margin, r.min_ratio - bound);
      worst_corner = std::max(worst_corner, std::abs(r.ratio_at_off_axis - 1.0 / 72.0));
      ++kits;
    }
  }
  v.pass = worst_margin >= -1e-9 && worst_corner <= 1e-9 && slowest <= 5.0;
  v.detail = fmt("%d kits, min(ratio - bound) %.3g, off-axis corner |ratio - 1/72| %.3g, slowest kit %.2f s", kits,
                 worst_margin, worst_corner, slowest);
  return v;
}

Verdict trapezium_ninth() {
  double worst = INFINITY, per_triangle_lo = INFINITY, per_triangle_hi = 0.0;
  for (double s : {0.5, 1.0, 2.0}) {
    const SlopeSequence b = SlopeSequence::power(s, 256);
    for (std::size_t n = 1; n <= 7; ++n) {
      const PerronBlock blk = build_block(b, n);
      const auto [area_v, area_k] = thm2_areas(b, blk);
      (void)area_k;
      worst = std::min(worst, area_v / blk.area_original);
      for (std::size_t k = blk.first; k < 2 * blk.first; ++k) {
        const double tri = 0.5 * (b[k] - b[k - 1]);
        const SlabPiece v = trapezium_piece(b[k - 1], b[k]);
        const double trap = union_area_pieces(std::span(&v, 1));
        per_triangle_lo = std::min(per_triangle_lo, trap / tri);
        per_triangle_hi = std::max(per_triangle_hi, trap / tri);
      }
    }
  }
  return {worst >= 1.0 / 9.0,
          fmt("min |V^n|/|U Delta_k| = %.6f over s in {0.5,1,2}, n = 1..7; |V_k|/|Delta_k| in [%.12f, %.12f]", worst,
              per_triangle_lo, per_triangle_hi)};
}

Verdict perron_decay() {
  const auto t0 = Clock::now();
  const SlopeSequence b = SlopeSequence::power(1.0, 256);
  const std::vector<PerronBlock> blocks = build_blocks(b, 2, 7);
  const double elapsed = seconds_since(t0);
  bool ok = elapsed <= 30.0;
  std::string eps;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    ok = ok && blocks[i].eps_measured <= blocks[i].eps_bound;
    if (i) ok = ok && blocks[i].eps_measured < blocks[i - 1].eps_measured;
    eps += fmt("%s%.4f", i ? " " : "", blocks[i].eps_measured);
  }
  ok = ok && blocks.back().eps_measured < blocks.front().eps_measured / 1.5;
  return {ok, "eps_2..7 = " + eps + fmt(", %.2f s", elapsed)};
}

Verdict thm2_pipeline() {
  const auto t0 = Clock::now();
  const SlopeSequence b = SlopeSequence::power(1.0, 128);
  Thm2Config full;
  const Thm2Result r = thm2_experiment(b, full);
  bool ok = r.rows.size() == 5;
  std::string floors;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const ExperimentRow& e = r.rows[i];
    ok = ok && e.ratio_floor >= 1.0 / (9.0 * e.eps_n) && e.ratio_measured + e.raster_err >= e.ratio_floor && e.sound;
    if (i) ok = ok && e.ratio_floor > r.rows[i - 1].ratio_floor;
    floors += fmt("%s%.4f", i ? " " : "", e.ratio_floor);
  }
  Thm2Config quarter = full, ninth = full;
  quarter.raster = ninth.raster = false;
  ninth.delta_rule = "geometric:" + fmt("%.17g", 1.0 / 9.0);
  const Thm2Result a = thm2_experiment(b, quarter), c = thm2_experiment(b, ninth);
  double drift = 0.0;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    drift = std::max(drift, std::abs(a.rows[i].ratio_floor - c.rows[i].ratio_floor) / a.rows[i].ratio_floor);
  }
  const double elapsed = seconds_since(t0);
  ok = ok && r.sound && drift <= 1e-9 && elapsed <= 300.0;
  double slack = INFINITY;
  for (const ExperimentRow& e : r.rows) slack = std::min(slack, (e.ratio_measured + e.raster_err) / e.ratio_floor);
  return {ok, "floors " + floors +
                  fmt(", delta drift %.2g, min (measured + err)/floor %.2f at 2048 columns, %.1f s", drift, slack,
                      elapsed)};
}

RectSequence random_sequence(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RectSequence seq;
  const std::size_t len = 1 + rng() % 40;
  double length = 0.5 + 1.5 * u(rng);
  for (std::size_t k = 0; k < len; ++k) {
    const double aspect = 1.0 + 19.0 * u(rng) * u(rng);
    seq.rects.push_back(Rect::from_sides(length, length / aspect, 3.2 * u(rng)));
    length *= 0.3 + 0.7 * u(rng);
  }
  return seq;
}

Verdict lemma_linear() {
  std::mt19937_64 rng(4242);
  int failures = 0;
  double worst_alpha_gap = -INFINITY, worst_area = 0.0;
  for (int i = 0; i < 500; ++i) {
    const RectSequence seq = random_sequence(rng);
    const LemmaLinearReport r = lemma_linear_check(seq, seq.size());
    if (!(r.premise_holds && r.alpha_bound_holds && r.area_bound_holds)) ++failures;
    worst_alpha_gap = std::max(worst_alpha_gap, r.alpha_star - (r.growth_constant + 2.0));
    worst_area = std::max(worst_area, r.worst_area_ratio);
  }
  const RectSequence nested = nested_similar_family(16, 1.0);
  const LemmaLinearReport n = lemma_linear_check(nested, nested.size());
  const bool exact = std::abs(n.growth_constant - 4.0) <= 1e-9 && std::abs(n.alpha_star - 2.0) <= 1e-9;
  return {failures == 0 && exact,
          fmt("500 sequences, %d failures, max alpha* - (C + 2) = %.3f, max Q_k/(alpha*^2 |R_k|) = %.3f; "
              "nested-similar C = %.12f, alpha* = %.12f",
              failures, worst_alpha_gap, worst_area, n.growth_constant, n.alpha_star)};
}

Verdict weak_type() {
  const auto t0 = Clock::now();
  const WeakTypeConfig cfg;
  const auto results = weak_type_experiment(cfg);
  const double elapsed = seconds_since(t0);
  bool ok = results.size() == 3 && elapsed <= 180.0;
  std::string slack;
  std::size_t lines = 0;
  for (const auto& r : results) {
    ok = ok && r.pass && r.reports.size() == 50;
    for (const auto& rep : r.reports) lines += rep.lines.size();
    slack += fmt("%s %s %.3f", slack.empty() ? "" : ",", r.family.c_str(), r.worst_slack);
  }
  return {ok, fmt("%zu checks at %d columns, worst measured/allowed:", lines, cfg.resolution) + slack +
                  fmt(", %.1f s", elapsed)};
}

Verdict lpgood() {
  const std::size_t K = 12;
  std::vector<double> lambdas;
  for (std::size_t k = 0; k <= K; ++k) lambdas.push_back(1.0 / static_cast<double>(k + 1));
  const LpGoodFamily fam = lpgood_family(lambdas, K);
  double worst_err = 0.0;
  bool witness = true;
  std::size_t checked = 0;
  for (const LpGoodPair& p : fam.pairs) {
    if (p.k > 10) continue;
    const double l = lambdas[p.k];
    const double formula = (std::ldexp(1.0, -static_cast<int>(p.i)) + std::ldexp(1.0, -static_cast<int>(p.j))) *
                           (std::ldexp(1.0, static_cast<int>(p.i) - static_cast<int>(p.k)) +
                            std::ldexp(1.0, static_cast<int>(p.j) - static_cast<int>(p.k))) *
                           l * l;
    worst_err = std::max(worst_err, std::abs(p.measured - formula) / formula);
    const double area_i = std::ldexp(1.0, -static_cast<int>(p.k)) * l * l;
    witness = witness && p.measured / area_i >= std::ldexp(1.0, static_cast<int>(p.j - p.i));
    ++checked;
  }
  bool growing = fam.chains.back() > fam.chains.front();
  for (std::size_t k = 1; k < fam.chains.size(); ++k) growing = growing && fam.chains[k] >= fam.chains[k - 1];
  const bool chains_ok = static_cast<double>(fam.chains[K]) >= static_cast<double>(K) / 4.0;
  return {checked > 0 && worst_err <= 1e-9 && witness && growing && chains_ok,
          fmt("%zu pairs with k <= 10, max relative formula error %.3g, witness %s, chains at k = 12: %zu", checked,
              worst_err, witness ? "holds" : "fails", fam.chains[K])};
}

Box family_box(const std::vector<ConvexPolygon>& ps) {
  Box b = ps[0].bounding_box();
  for (const auto& p : ps) b = b.merged(p.bounding_box());
  return b.dilated(1e-3 * b.width() + 1e-6, 1e-3 * b.height() + 1e-6);
}

Verdict union_concordance() {
  std::mt19937_64 rng(9001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int star_bad = 0, tri_bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<ConvexPolygon> ps;
    const int count = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < count; ++i) {
      const Rect r = Rect::from_sides(0.05 + 2.0 * u(rng), 0.05 + 2.0 * u(rng), 6.3 * u(rng));
      const Rect s = Rect::from_sides(0.05 + 2.0 * u(rng), 0.05 + 2.0 * u(rng), 6.3 * u(rng));
      ps.push_back(difference_set(r, s));
    }
    const double exact = union_area_star(ps);
    const GridEstimate g = union_area_grid(ps, family_box(ps), 512);
    if (std::abs(exact - g.estimate) > g.err) ++star_bad;
    worst = std::max(worst, std::abs(exact - g.estimate) / g.err);
  }
  for (int t = 0; t < 200; ++t) {
    std::vector<Triangle> ts;
    std::vector<ConvexPolygon> ps;
    const int count = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < count; ++i) {
      const double a = 3.0 * u(rng), w = 0.02 + u(rng), apex = -0.5 + 4.0 * u(rng);
      ts.emplace_back(Vec2{a, 0}, Vec2{a + w, 0}, Vec2{apex, 1});
      ps.push_back(ts.back().polygon());
    }
    const double exact = union_area_triangles(ts);
    const GridEstimate g = union_area_grid(ps, family_box(ps), 512);
    if (std::abs(exact - g.estimate) > g.err) ++tri_bad;
    worst = std::max(worst, std::abs(exact - g.estimate) / g.err);
  }
  return {star_bad == 0 && tri_bad == 0,
          fmt("200 star and 200 triangle families, %d + %d outside the bracket, max |exact - grid|/err = %.3f",
              star_bad, tri_bad, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"bisection area identity", bisection_identity},
      {"1/72 intersection lemma", lemma_1_72},
      {"trapezium union at least 1/9", trapezium_ninth},
      {"Perron block decay", perron_decay},
      {"THM2 blow-up pipeline", thm2_pipeline},
      {"linear growth and almost-nestedness", lemma_linear},
      {"corrected weak type", weak_type},
      {"lpgood example", lpgood},
      {"union oracle concordance", union_concordance},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!pick.empty() && !pick.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
