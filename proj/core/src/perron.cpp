#include "perronlab/perron.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "perronlab/parallel.hpp"

namespace perronlab {

// ---------------------------------------------------------------- slopes

SlopeSequence SlopeSequence::power(double s, std::size_t count) {
  if (!(s > 0.0)) throw std::invalid_argument("slope sequence: exponent must be positive");
  if (count < 2) throw std::invalid_argument("slope sequence: need at least two values");
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) v[k] = std::pow(static_cast<double>(k), s);
  char buf[64];
  std::snprintf(buf, sizeof buf, "power(%.17g)", s);
  return SlopeSequence(std::move(v), buf);
}

SlopeSequence SlopeSequence::explicit_values(std::vector<double> values) {
  if (values.size() < 2) throw std::invalid_argument("slope sequence: need at least two values");
  if (values[0] != 0.0) throw std::invalid_argument("slope sequence: b_0 must be 0");
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k] > values[k - 1])) throw std::invalid_argument("slope sequence: values must be strictly increasing");
  }
  return SlopeSequence(std::move(values), "explicit");
}

std::size_t perron_horizon(const SlopeSequence& b) { return (b.size() - 1) / 3; }

PerronFactor perron_factor(const SlopeSequence& b, std::size_t N) {
  if (N == 0) throw std::invalid_argument("perron_factor: N must be at least 1");
  if (3 * N >= b.size()) throw std::out_of_range("perron_factor: prefix shorter than 3N + 1");
  PerronFactor best;
  for (std::size_t n = 1; n <= N; ++n) {
    for (std::size_t l = 1; l <= n; ++l) {
      const double r = (b[n + 2 * l] - b[n + l]) / (b[n + l] - b[n]);
      const double g = r + 1.0 / r;
      if (g > best.value) best = {g, n, l};
    }
  }
  return best;
}

TechnicalConstant technical_constant(const SlopeSequence& b, std::size_t N) {
  if (N == 0 || N >= b.size()) throw std::out_of_range("technical_constant: need 1 <= N < prefix length");
  TechnicalConstant best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t k = 1; k <= N; ++k) {
    const double gap = b[k] - b[k - 1];
    const double c = (1.0 + b[k - 1] * b[k - 1]) / (gap * gap);
    if (c < best.value) best = {c, k};
  }
  return best;
}

std::vector<Triangle> triangles(const SlopeSequence& b) {
  std::vector<Triangle> out;
  out.reserve(b.size() - 1);
  for (std::size_t k = 1; k < b.size(); ++k) out.emplace_back(Vec2{0.0, 1.0}, Vec2{b[k - 1], 0.0}, Vec2{b[k], 0.0});
  return out;
}

// ---------------------------------------------------------------- bisection

namespace {

struct Standing {
  double left;
  double right;
  Vec2 apex;
};

// Base on y = 0, apex strictly above.
Standing standing(const Triangle& t) {
  const double tol = 1e-12 * std::max({1.0, std::fabs(t.a.x), std::fabs(t.b.x), std::fabs(t.c.x)});
  std::array<Vec2, 3> v{t.a, t.b, t.c};
  std::sort(v.begin(), v.end(), [](Vec2 p, Vec2 q) { return p.y < q.y; });
  if (std::fabs(v[0].y) > tol || std::fabs(v[1].y) > tol || !(v[2].y > tol)) {
    throw std::invalid_argument("bisection_step: triangles must stand on y = 0 with the apex above");
  }
  return {std::min(v[0].x, v[1].x), std::max(v[0].x, v[1].x), v[2]};
}

SlabPiece piece_of(const Standing& s, double shift = 0.0) {
  return {0.0, s.apex.y, s.left - shift, s.apex.x - shift, s.right - shift, s.apex.x - shift};
}

}  // namespace

BisectionResult bisection_step(const Triangle& t1, const Triangle& t2, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bisection_step: alpha must lie in (0,1)");
  const Standing s1 = standing(t1);
  const Standing s2 = standing(t2);
  const double scale = std::max({1.0, s2.right - s1.left, s1.apex.y});
  if (std::fabs(s1.right - s2.left) > 1e-12 * scale) {
    throw std::invalid_argument("bisection_step: t2 must be the right neighbour of t1");
  }
  if (norm(s1.apex - s2.apex) > 1e-12 * scale) throw std::invalid_argument("bisection_step: triangles must share the apex");

  const double h = s1.apex.y;
  auto x_at = [h](double base_x, Vec2 apex, double y) { return base_x + (apex.x - base_x) * y / h; };
  BisectionResult r;
  r.shift = x_at(s2.right, s2.apex, alpha * h) - x_at(s1.left, s1.apex, alpha * h);
  const double x = s1.right - s1.left;
  const double y = s2.right - s2.left;
  if (alpha < std::max(x, y) / (x + y) * (1.0 - 1e-12)) {
    // The slid triangle would pass the far base vertex and the union changes shape.
    throw std::invalid_argument("bisection_step: alpha must be at least max(x,y)/(x+y)");
  }
  r.predicted = alpha * alpha + (1.0 - alpha) * (1.0 - alpha) * (x / y + y / x);
  const std::vector<SlabPiece> before{piece_of(s1), piece_of(s2)};
  const std::vector<SlabPiece> after{piece_of(s1), piece_of(s2, r.shift)};
  r.measured = union_area_pieces(after) / union_area_pieces(before);
  return r;
}

// ---------------------------------------------------------------- schedules

double perron_bound(std::size_t n, double alpha, double G) {
  return std::pow(alpha, 2.0 * static_cast<double>(n)) + G * (1.0 - alpha) / (1.0 + alpha);
}

std::vector<double> AlphaSchedule::resolve(std::size_t n, double G) const {
  if (n == 0) return {};
  double a = value;
  switch (kind) {
    case Kind::BoundOptimal: {
      auto f = [n, G](double x) { return perron_bound(n, x, G); };
      a = boost::math::tools::brent_find_minima(f, 1e-3, 1.0 - 1e-12, 48).first;
      break;
    }
    case Kind::Classical:
      a = std::max(1.0 - 1.0 / std::sqrt(static_cast<double>(n)), G / (1.0 + G));
      break;
    case Kind::Constant:
      break;
    case Kind::PerLevel: {
      if (levels.empty()) throw std::invalid_argument("alpha schedule: empty level list");
      std::vector<double> out(n);
      for (std::size_t m = 0; m < n; ++m) out[m] = levels[std::min(m, levels.size() - 1)];
      for (double x : out) {
        if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("alpha schedule: levels must lie in (0,1]");
      }
      return out;
    }
  }
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("alpha schedule: alpha must lie in (0,1]");
  return std::vector<double>(n, a);
}

AlphaSchedule AlphaSchedule::parse(const std::string& text) {
  AlphaSchedule s;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto number = [](const std::string& t) {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("alpha schedule: bad number '" + t + "'");
    return v;
  };
  if (head == "optimal" && tail.empty()) {
    s.kind = Kind::BoundOptimal;
  } else if (head == "classical" && tail.empty()) {
    s.kind = Kind::Classical;
  } else if (head == "constant" && !tail.empty()) {
    s.kind = Kind::Constant;
    s.value = number(tail);
  } else if (head == "levels" && !tail.empty()) {
    s.kind = Kind::PerLevel;
    std::stringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ',')) s.levels.push_back(number(item));
  } else {
    throw std::invalid_argument("alpha schedule: expected optimal, classical, constant:A or levels:A,B,...");
  }
  return s;
}

std::string AlphaSchedule::to_string() const {
  char buf[64];
  switch (kind) {
    case Kind::BoundOptimal:
      return "optimal";
    case Kind::Classical:
      return "classical";
    case Kind::Constant:
      std::snprintf(buf, sizeof buf, "constant:%.17g", value);
      return buf;
    case Kind::PerLevel: {
      std::string out = "levels:";
      for (std::size_t i = 0; i < levels.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", levels[i]);
        out += buf;
      }
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------- blocks

bool PerronBlock::levels_within_G(double tol) const {
  return std::all_of(level_max_ratio.begin(), level_max_ratio.end(), [&](double r) { return r <= G + tol; });
}

std::vector<Triangle> block_triangles(const SlopeSequence& b, const PerronBlock& block) {
  std::vector<Triangle> out;
  out.reserve(block.count());
  for (std::size_t i = 0; i < block.count(); ++i) {
    const std::size_t k = block.first + i;
    const double t = block.translations[i];
    out.emplace_back(Vec2{t, 1.0}, Vec2{b[k - 1] + t, 0.0}, Vec2{b[k] + t, 0.0});
  }
  return out;
}

PerronBlock build_block(const SlopeSequence& b, std::size_t n, const AlphaSchedule& schedule) {
  if (n > 40) throw std::out_of_range("build_block: block index too large");
  const std::size_t first = std::size_t{1} << n;
  if (2 * first > b.size()) throw std::out_of_range("build_block: block exceeds the stored slope prefix");

  PerronBlock blk;
  blk.n = n;
  blk.first = first;
  blk.translations.assign(first, 0.0);
  const std::size_t horizon = perron_horizon(b);
  blk.G = horizon >= 1 ? std::max(2.0, perron_factor(b, horizon).value) : 2.0;
  blk.alphas = schedule.resolve(n, blk.G);

  // Cores share the apex height and stand side by side; each carries the
  // original triangles it was built from.
  struct Core {
    std::vector<std::size_t> members;  // offsets into the block
    double left;
    double right;
  };
  std::vector<Core> cores;
  cores.reserve(first);
  for (std::size_t i = 0; i < first; ++i) cores.push_back({{i}, b[first + i - 1], b[first + i]});

  for (std::size_t m = 0; m < n; ++m) {
    const double alpha = blk.alphas[m];
    double worst = 0.0;
    std::vector<Core> next;
    next.reserve(cores.size() / 2 + 1);
    for (std::size_t j = 0; j + 1 < cores.size(); j += 2) {
      Core& c1 = cores[j];
      Core& c2 = cores[j + 1];
      const double x = c1.right - c1.left;
      const double y = c2.right - c2.left;
      worst = std::max(worst, x / y + y / x);
      if (alpha < std::max(x, y) / (x + y) * (1.0 - 1e-12)) blk.pairing_regime_ok = false;
      const double shift = (1.0 - alpha) * (x + y);
      for (std::size_t i : c2.members) blk.translations[i] -= shift;
      Core merged{std::move(c1.members), c1.left, c1.left + alpha * (x + y)};
      merged.members.insert(merged.members.end(), c2.members.begin(), c2.members.end());
      next.push_back(std::move(merged));
    }
    if (cores.size() % 2 == 1) next.push_back(std::move(cores.back()));
    blk.level_max_ratio.push_back(worst);

    // Re-abut left to right.
    double pos = next.front().left;
    for (Core& c : next) {
      const double d = pos - c.left;
      for (std::size_t i : c.members) blk.translations[i] += d;
      const double w = c.right - c.left;
      c.left = pos;
      c.right = pos + w;
      pos += w;
    }
    cores = std::move(next);
  }

  double log_sum = 0.0;
  for (double a : blk.alphas) log_sum += std::log(a);
  blk.alpha_eff = n ? std::exp(log_sum / static_cast<double>(n)) : 1.0;
  blk.eps_bound = n ? perron_bound(n, blk.alpha_eff, blk.G) : 1.0;

  std::vector<SlabPiece> orig;
  std::vector<SlabPiece> moved;
  orig.reserve(first);
  moved.reserve(first);
  for (std::size_t i = 0; i < first; ++i) {
    const std::size_t k = first + i;
    const double t = blk.translations[i];
    orig.push_back({0.0, 1.0, b[k - 1], 0.0, b[k], 0.0});
    moved.push_back({0.0, 1.0, b[k - 1] + t, t, b[k] + t, t});
  }
  blk.area_original = union_area_pieces(orig);
  blk.area_translated = union_area_pieces(moved);
  blk.eps_measured = blk.area_translated / blk.area_original;
  return blk;
}

std::vector<PerronBlock> build_blocks(const SlopeSequence& b, std::size_t n_lo, std::size_t n_hi,
                                      const AlphaSchedule& schedule) {
  if (n_hi < n_lo) throw std::invalid_argument("build_blocks: empty block range");
  std::vector<PerronBlock> out(n_hi - n_lo + 1);
  // Largest blocks first so the chunks balance a little better.
  parallel_for(out.size(), [&](std::size_t i) {
    const std::size_t j = out.size() - 1 - i;
    out[j] = build_block(b, n_lo + j, schedule);
  });
  return out;
}

std::string block_svg(const SlopeSequence& b, const PerronBlock& block) {
  const std::vector<Triangle> ts = block_triangles(b, block);
  Box box = ts.front().polygon().bounding_box();
  for (const Triangle& t : ts) box = box.merged(t.polygon().bounding_box());
  const double pad = 0.02 * std::max(box.width(), box.height());
  box = box.dilated(pad, pad);
  const double px = 800.0 / box.width();
  const double height_px = std::max(box.height() * px, 50.0);
  const double py = height_px / box.height();

  std::string out;
  char buf[256];
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"%.9g\" "
                "viewBox=\"0 0 800 %.9g\">\n",
                height_px, height_px);
  out += buf;
  std::snprintf(buf, sizeof buf, "<!-- perron block n=%zu eps=%.17g bound=%.17g slopes=%s -->\n", block.n,
                block.eps_measured, block.eps_bound, b.description().c_str());
  out += buf;
  out += "<g fill=\"#3b6ea5\" fill-opacity=\"0.25\" stroke=\"#1d3557\" stroke-width=\"0.5\">\n";
  for (const Triangle& t : ts) {
    out += "<polygon points=\"";
    bool first = true;
    for (Vec2 p : {t.a, t.b, t.c}) {
      std::snprintf(buf, sizeof buf, "%s%.9g,%.9g", first ? "" : " ", (p.x - box.x0) * px, (box.y1 - p.y) * py);
      out += buf;
      first = false;
    }
    out += "\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace perronlab
