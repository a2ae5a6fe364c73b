#include "perronlab/process.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "perronlab/parallel.hpp"

namespace perronlab {

TriangleKit companion_rect(const Triangle& t, std::optional<double> alpha_cap) {
  const Vec2 apex{0.0, 1.0};
  std::vector<Vec2> base;
  bool has_apex = false;
  for (Vec2 p : {t.a, t.b, t.c}) {
    if (norm(p - apex) <= 1e-12) {
      has_apex = true;
    } else if (std::fabs(p.y) <= 1e-12) {
      base.push_back(p);
    }
  }
  if (!has_apex || base.size() != 2) throw std::invalid_argument("companion_rect: need apex (0,1) and a base on y = 0");
  const double b = std::min(base[0].x, base[1].x);
  const double c = std::max(base[0].x, base[1].x);
  return companion_rect(b, c, alpha_cap);
}

TriangleKit companion_rect(double b, double c, std::optional<double> alpha_cap) {
  if (!(b >= 0.0) || !(c > b)) throw std::invalid_argument("companion_rect: need 0 <= b < c");
  const Vec2 A{0.0, 1.0};
  const Vec2 B{b, 0.0};
  const Vec2 C{c, 0.0};
  const Vec2 Bp = A + (B - A) * 1.5;
  const Vec2 Cp = A + (C - A) * 1.5;
  const double ac = std::sqrt(1.0 + c * c);
  const double long_side = 1.5 * ac;
  const double short_side = 1.5 * (c - b) / ac;  // distance from B' to the line AC'
  const double angle = std::atan2(C.y - A.y, C.x - A.x);
  double alpha = ac / (c - b);
  if (alpha_cap) alpha = std::min(alpha, *alpha_cap);
  return {Triangle(A, B, C), Rect::from_sides(long_side, short_side, angle), ConvexPolygon({B, C, Cp, Bp}), Bp, Cp,
          alpha};
}

SlabPiece trapezium_piece(double b, double c, double shift) {
  return {-0.5, 0.0, 1.5 * b + shift, b + shift, 1.5 * c + shift, c + shift};
}

std::vector<double> delta_sequence(const std::string& rule, std::size_t count) {
  const auto colon = rule.find(':');
  const std::string head = rule.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : rule.substr(colon + 1);
  std::vector<double> out;
  if (head == "geometric" && !tail.empty()) {
    const double r = std::stod(tail);
    if (!(r > 0.0)) throw std::invalid_argument("delta rule: ratio must be positive");
    for (std::size_t n = 0; n < count; ++n) out.push_back(std::pow(r, static_cast<double>(n)));
  } else if (head == "list" && !tail.empty()) {
    std::stringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.size() < count) throw std::invalid_argument("delta rule: list shorter than the block count");
    out.resize(count);
  } else {
    throw std::invalid_argument("delta rule: expected geometric:R or list:A,B,...");
  }
  for (double d : out) {
    if (!(d > 0.0)) throw std::invalid_argument("delta rule: values must be positive");
  }
  return out;
}

RectProcess assemble_process(const SlopeSequence& b, const std::vector<double>& delta, double threshold) {
  if (delta.empty()) throw std::invalid_argument("assemble_process: need at least one block");
  const std::size_t blocks = delta.size();
  if (blocks > 40 || (std::size_t{1} << blocks) > b.size()) {
    throw std::out_of_range("assemble_process: slope prefix too short for the requested blocks");
  }
  RectProcess proc{b, delta, {}, {}, false, {}};
  proc.rects.source = "process(" + b.description() + ")";
  for (std::size_t n = 0; n < blocks; ++n) {
    double worst = 0.0;
    for (std::size_t k = std::size_t{1} << n; k < (std::size_t{2} << n); ++k) {
      const Rect r = companion_rect(b[k - 1], b[k]).p_rect.scaled(delta[n]);
      worst = std::max(worst, r.diameter());
      proc.rects.rects.push_back(r);
    }
    proc.block_max_diam.push_back(worst);
  }
  if (blocks == 1) {
    proc.admissible = proc.block_max_diam[0] < threshold;
    proc.warning = "single block: admissibility is vacuous";
    return proc;
  }
  // Decreasing tail of block maxima, ending below the threshold.
  std::size_t start = blocks - 1;
  while (start > 0 && proc.block_max_diam[start - 1] > proc.block_max_diam[start]) --start;
  proc.admissible = start < blocks - 1 && proc.block_max_diam.back() < threshold;
  return proc;
}

double intersection_ratio(const TriangleKit& kit, Vec2 x) {
  const auto c = clip(kit.p_rect.polygon(x), kit.delta.polygon());
  return (c ? c->area() : 0.0) / kit.p_rect.area();
}

IntersectionReport verify_intersection_bound(const TriangleKit& kit, std::size_t samples, std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("verify_intersection_bound: need at least 100 samples");
  const auto v = kit.v_trap.vertices();
  // Fan triangulation of V from its first vertex.
  std::vector<std::array<Vec2, 3>> fan;
  std::vector<double> weight;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    fan.push_back({v[0], v[i], v[i + 1]});
    weight.push_back(0.5 * std::fabs(cross(v[i] - v[0], v[i + 1] - v[0])));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
  std::vector<Vec2> pts{kit.b_prime, kit.c_prime};
  pts.reserve(samples + 2);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto& t = fan[pick(rng)];
    double r1 = u(rng);
    double r2 = u(rng);
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    pts.push_back(t[0] + (t[1] - t[0]) * r1 + (t[2] - t[0]) * r2);
  }
  std::vector<double> ratio(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { ratio[i] = intersection_ratio(kit, pts[i]); });

  IntersectionReport rep;
  const auto it = std::min_element(ratio.begin(), ratio.end());
  rep.min_ratio = *it;
  rep.argmin = pts[static_cast<std::size_t>(it - ratio.begin())];
  rep.bound = std::min(kit.alpha_loc, 1.0) / 72.0;
  rep.ratio_at_off_axis = ratio[0];
  rep.ratio_at_on_axis = ratio[1];
  rep.samples = pts.size();
  rep.holds = rep.min_ratio >= rep.bound - 1e-9;
  return rep;
}

}  // namespace perronlab
