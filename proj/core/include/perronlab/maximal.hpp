#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perronlab/correct_factors.hpp"
#include "perronlab/perron.hpp"
#include "perronlab/process.hpp"
#include "perronlab/raster.hpp"

namespace perronlab {

/// Thrown when the slopes fail a hypothesis of the blow-up experiment.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentRow {
  std::size_t n = 0;
  double t0 = 0.0;
  double eps_n = 0.0;           // measured |K^n| / |U Delta_k|
  double eps_bound = 0.0;
  double ratio_measured = 0.0;  // |{T* >= t0}| / |K^n| on the raster
  double ratio_floor = 0.0;     // |V^n| / |K^n|, exact
  double raster_err = 0.0;
  double v_over_union = 0.0;    // |V^n| / |U Delta_k|, at least 1/9
  double inv_9eps = 0.0;        // 1 / (9 eps_n)
  double area_v = 0.0;          // |delta_n V^n|
  double area_k = 0.0;          // |delta_n K^n|
  int n_cols = 0;
  int n_rows = 0;
  std::size_t kernels = 0;
  double probe_min_ratio = 0.0;  // min over V probes of T*(x) / t0, exact clipping
  double probe_max_excess = 0.0; // max over grid probes of |raster - exact| - err (<= 0 passes)
  bool sound = false;            // every assertion of the row
};

struct Thm2Config {
  std::string delta_rule = "geometric:0.25";
  std::size_t n_lo = 2;
  std::size_t n_hi = 6;
  int resolution = 2048;     // columns; rows follow from the resolution guard
  int max_rows = 16384;
  AlphaSchedule schedule;
  std::size_t probes = 16;   // per row, in V^n and on the grid each
  std::uint64_t seed = 1;
  bool raster = true;        // false: exact columns only
  double growth_cap = 64.0;  // refuse when the Perron factor estimate exceeds this
  double c_floor = 1e-6;     // refuse when the technical constant falls below this
};

struct Thm2Result {
  std::vector<ExperimentRow> rows;
  double c_star = 0.0;
  double G = 0.0;
  double t0 = 0.0;
  bool admissible = false;
  std::string warning;
  bool sound = false;
};

/// Checks the two slope hypotheses on the prefix; throws HypothesisError.
void check_thm2_hypotheses(const SlopeSequence& b, const Thm2Config& config, double& c_star, double& G);

/// For each block n: K^n, V^n, the exact floor |V^n|/|K^n| and, on a raster,
/// the measure of {T* chi_{delta_n K^n} >= t0} with T* over the block's own
/// rectangles delta_n P_k (a lower bound for the full operator, so the
/// soundness inequality stays valid).
Thm2Result thm2_experiment(const SlopeSequence& b, const Thm2Config& config);

/// |V^n| and |K^n| for block n, unscaled.
std::pair<double, double> thm2_areas(const SlopeSequence& b, const PerronBlock& block);

/// W_{k,p} for k < horizon, with Q_k = q_lo over the prefix.
std::vector<double> correct_normalizers(const RectSequence& seq, double p, std::size_t horizon);

/// sup_{k < horizon} |int_{x+R_k} f| / W_{k,p} on f's grid.
RasterField corrected_maximal_field(const RasterField& f, const RectSequence& seq, double p, std::size_t horizon);

struct WeakTypeLine {
  double p = 1.0;
  double lambda = 0.0;
  double measured = 0.0;  // |{T*_p f > lambda}|
  double err = 0.0;
  double bound = 0.0;     // lambda^{-p} ||f||_p^p
  bool pass = false;      // measured <= bound (1 + margin) + err
};

struct WeakTypeReport {
  std::vector<WeakTypeLine> lines;
  bool pass = true;
};

/// Operator and normalisers for one sequence, reused across input fields.
class WeakTypeTester {
 public:
  WeakTypeTester(const RasterGrid& grid, const RectSequence& seq, std::size_t horizon, std::vector<double> ps,
                 double margin = 0.05);
  /// Throws std::invalid_argument when f's superlevel sets could leave the window.
  WeakTypeReport check(const RasterField& f, std::span<const double> lambdas) const;
  const MaximalOperator& op() const { return op_; }

 private:
  MaximalOperator op_;
  std::vector<double> ps_;
  std::vector<std::vector<double>> norms_;
  double margin_;
};

WeakTypeReport weak_type_check(const RasterField& f, const RectSequence& seq, double p,
                               std::span<const double> lambdas, std::size_t horizon);

struct LpGoodPair {
  std::size_t k = 0, i = 0, j = 0;
  double formula = 0.0;   // (2^-i + 2^-j)(2^{i-k} + 2^{j-k}) lambda_k^2
  double measured = 0.0;  // |R^k_i - R^k_j| from difference_set
  double ratio = 0.0;     // measured / |R^k_i|
};

struct LpGoodFamily {
  RectSequence seq;
  std::vector<std::size_t> block_start;  // index of R^k_0 in seq
  std::vector<LpGoodPair> pairs;         // all i < j <= k in every block
  double max_formula_err = 0.0;          // relative
  bool witness_holds = true;             // ratio >= 2^{j-i} for every pair
  std::vector<std::size_t> chains;       // greedy chain count on the prefix through block k
  double chain_alpha = 4.0;
};

/// Blocks k = 0..K with R^k_i = [-2^{-i-1} l_k, 2^{-i-1} l_k] x [-2^{i-k-1} l_k, 2^{i-k-1} l_k],
/// i = 0..k, each block in decreasing horizontal side. Requires K + 1 strictly
/// decreasing positive lambdas.
LpGoodFamily lpgood_family(std::span<const double> lambdas, std::size_t K, double chain_alpha = 4.0);

/// The three families of the weak-type experiment, scaled to diameter <= `scale`.
RectSequence nested_similar_family(std::size_t count, double scale);
RectSequence thm2_prefix_family(std::size_t blocks, double scale);
RectSequence lpgood_prefix_family(std::size_t blocks, double scale);

/// "nested-similar" (5 terms), "thm2-prefix" (7) or "lpgood-prefix" (6), at
/// diameter 1. Throws std::invalid_argument for other names.
RectSequence weak_type_family(const std::string& name);

/// Sum of `count` random axis rectangles inside `support`, coefficients in [0.2, 1].
RasterField random_simple_function(std::mt19937_64& rng, const RasterGrid& grid, const Box& support, int count);

struct WeakTypeConfig {
  std::vector<std::string> families{"nested-similar", "thm2-prefix", "lpgood-prefix"};
  std::size_t functions = 50;
  int pieces = 5;
  int resolution = 512;
  std::vector<double> ps{1.0, 1.5, 2.0};
  std::vector<double> lambdas{0.1, 0.3, 0.9};
  std::uint64_t seed = 1;
  double margin = 0.05;
};

struct WeakTypeFamilyResult {
  std::string family;
  std::size_t terms = 0;
  int n_cols = 0;
  int n_rows = 0;
  std::vector<WeakTypeReport> reports;  // one per function
  double worst_slack = 0.0;  // max over lines of measured / (bound (1 + margin) + err)
  bool pass = true;
};

/// Random simple functions on [-0.75, 0.75]^2 against every family; function i
/// of a family draws from a generator seeded with (seed, i). Columns are the
/// resolution; rows grow when the thinnest rectangle needs them.
std::vector<WeakTypeFamilyResult> weak_type_experiment(const WeakTypeConfig& config);

}  // namespace perronlab
