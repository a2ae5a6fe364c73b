#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "perronlab/geom.hpp"
#include "perronlab/union_area.hpp"

namespace perronlab {

/// Slopes b_0 = 0 < b_1 < b_2 < ... (finite prefix).
class SlopeSequence {
 public:
  /// b_k = k^s for k < count.
  static SlopeSequence power(double s, std::size_t count);
  /// Validated explicit list: b_0 = 0 and strictly increasing.
  static SlopeSequence explicit_values(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }
  const std::string& description() const { return description_; }

 private:
  SlopeSequence(std::vector<double> v, std::string d) : values_(std::move(v)), description_(std::move(d)) {}
  std::vector<double> values_;
  std::string description_;
};

struct PerronFactor {
  double value = 0.0;  // lower estimate of G_b
  std::size_t n = 0;   // maximising pair
  std::size_t l = 0;
};

/// max over 1 <= n <= N, 1 <= l <= n of r + 1/r with
/// r = (b_{n+2l} - b_{n+l}) / (b_{n+l} - b_n). Needs b_{3N}.
PerronFactor perron_factor(const SlopeSequence& b, std::size_t N);

/// Largest N for which perron_factor(b, N) is defined.
std::size_t perron_horizon(const SlopeSequence& b);

struct TechnicalConstant {
  double value = 0.0;  // c* = min_k (1 + b_{k-1}^2) / (b_k - b_{k-1})^2
  std::size_t k = 0;   // minimiser
};

TechnicalConstant technical_constant(const SlopeSequence& b, std::size_t N);

/// Delta_k with apex (0,1) and base [b_{k-1}, b_k] on the axis, for 1 <= k < size.
/// Element k-1 of the result is Delta_k.
std::vector<Triangle> triangles(const SlopeSequence& b);

struct BisectionResult {
  double shift = 0.0;      // t2 moves left by this amount
  double predicted = 0.0;  // alpha^2 + (1-alpha)^2 (x/y + y/x)
  double measured = 0.0;   // |t1 u (t2 - shift)| / |t1 u t2|
};

/// Slides t2 (the right neighbour of t1, same apex) left until its right edge
/// meets the left edge of t1 at height alpha*h. Both triangles must stand on
/// y = 0 and share the apex. The closed form needs alpha >= max(x,y)/(x+y)
/// for base lengths x, y; smaller alpha (or alpha outside (0,1)) throws.
BisectionResult bisection_step(const Triangle& t1, const Triangle& t2, double alpha);

/// Per-block level parameter alpha_n.
struct AlphaSchedule {
  enum class Kind {
    BoundOptimal,  // argmin_a a^{2n} + G (1-a)/(1+a)
    Classical,     // max(1 - 1/sqrt(n), G/(1+G))
    Constant,      // `value` at every level
    PerLevel,      // `levels[m]` at level m (last entry repeats)
  };
  Kind kind = Kind::BoundOptimal;
  double value = 0.5;
  std::vector<double> levels;

  /// Alpha used at each of the n levels of block n.
  std::vector<double> resolve(std::size_t n, double G) const;
  static AlphaSchedule parse(const std::string& text);
  std::string to_string() const;
};

/// alpha^{2n} + G (1 - alpha)/(1 + alpha).
double perron_bound(std::size_t n, double alpha, double G);

struct PerronBlock {
  std::size_t n = 0;
  std::size_t first = 0;            // k of the first triangle, 2^n
  std::vector<double> translations; // tau_k for k = first .. 2 first - 1
  std::vector<double> alphas;       // per level
  std::vector<double> level_max_ratio;  // max x/y + y/x met at each level
  double G = 0.0;                   // G_b estimate used by the schedule and bound
  double alpha_eff = 1.0;           // geometric mean of the level alphas
  double eps_bound = 1.0;
  double eps_measured = 1.0;
  double area_original = 0.0;       // |U Delta_k|
  double area_translated = 0.0;     // |U tau_k Delta_k|
  bool pairing_regime_ok = true;    // every level alpha >= max(x,y)/(x+y)

  std::size_t count() const { return translations.size(); }
  bool levels_within_G(double tol = 1e-9) const;
};

/// Translated triangles tau_k Delta_k of a block, in k order.
std::vector<Triangle> block_triangles(const SlopeSequence& b, const PerronBlock& block);

/// Builds the dyadic block {Delta_k : 2^n <= k < 2^{n+1}} with n pairing levels.
/// Throws std::out_of_range if the prefix is too short.
PerronBlock build_block(const SlopeSequence& b, std::size_t n, const AlphaSchedule& schedule = {});

/// Blocks n_lo..n_hi built in parallel, in order.
std::vector<PerronBlock> build_blocks(const SlopeSequence& b, std::size_t n_lo, std::size_t n_hi,
                                      const AlphaSchedule& schedule = {});

/// SVG 1.1 drawing of the translated block, one polygon per triangle.
std::string block_svg(const SlopeSequence& b, const PerronBlock& block);

}  // namespace perronlab
