#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "output.hpp"
#include "perronlab/correct_factors.hpp"
#include "perronlab/maximal.hpp"
#include "perronlab/perron.hpp"
#include "perronlab/process.hpp"

namespace perronlab::cli {

namespace fs = std::filesystem;

namespace {

std::string p_label(double p) { return "W_" + format_shortest(p); }

Json config_json(const Config& cfg) {
  Json j = Json::object();
  j["slopes"] = cfg.slopes;
  j["delta"] = cfg.delta;
  j["blocks"] = std::to_string(cfg.block_lo) + ".." + std::to_string(cfg.block_hi);
  j["resolution"] = cfg.resolution;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  j["p"] = cfg.p;
  j["lambda"] = cfg.lambda;
  return j;
}

void write_outputs(const fs::path& out, const std::string& stem, const CsvTable& csv, const Json& json,
                   const Config& cfg) {
  write_file(out / (stem + ".csv"), csv.str());
  write_file(out / (stem + ".json"), json_text(json));
  write_file(out / "config.txt", cfg.dump());
}

AlphaSchedule schedule_of(const Config& cfg) { return AlphaSchedule::parse(cfg.alpha); }

std::vector<double> lpgood_lambdas(std::size_t K) {
  std::vector<double> l;
  for (std::size_t k = 0; k <= K; ++k) l.push_back(1.0 / static_cast<double>(k + 1));
  return l;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"correct-factors", "perron", "thm2", "weaktype", "lemma72", "lpgood"};
  return names;
}

RectSequence config_sequence(const Config& cfg) {
  RectSequence seq;
  if (cfg.sequence == "nested-similar") {
    seq = nested_similar_family(cfg.length, 1.0);
  } else if (cfg.sequence == "constant") {
    seq.source = "constant";
    seq.rects.assign(cfg.length, Rect::from_sides(2.0, 1.0, 0.3));
  } else if (cfg.sequence == "lpgood") {
    seq = lpgood_family(lpgood_lambdas(cfg.lpgood_blocks), cfg.lpgood_blocks, cfg.chain_alpha).seq;
    seq.source = "lpgood";
  } else if (cfg.sequence == "process") {
    const SlopeSequence b = cfg.slope_sequence();
    seq = assemble_process(b, delta_sequence(cfg.delta, cfg.block_hi + 1), 1.0).rects;
    seq.source = "process";
  } else {
    throw UsageError("sequence: expected nested-similar, constant, lpgood or process");
  }
  if (seq.empty()) throw UsageError("sequence '" + cfg.sequence + "' is empty");
  return seq;
}

int cmd_correct_factors(const Config& cfg, const fs::path& out, std::ostream& log) {
  const RectSequence seq = config_sequence(cfg);
  const std::size_t n = seq.size();
  GrowthOptions opt;
  opt.growth_cap = cfg.growth_cap;
  const GrowthVerdict verdict = linear_growth_constant(seq, n, opt);
  const LemmaLinearReport lemma = lemma_linear_check(seq, n);
  const NestingReport nest = almost_nested_alpha(seq, n);

  std::vector<std::string> header{"k", "area", "q_lo", "q_hi"};
  for (double p : cfg.p) header.push_back(p_label(p));
  header.push_back("alpha_star_running");
  CsvTable csv(header);
  double running = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j <= k; ++j) running = std::max(running, min_nesting_alpha(seq[j], seq[k]));
    const CorrectFactor q = correct_factor(seq, k);
    std::vector<std::string> row{cell(k), cell(seq[k].area()), cell(q.q_lo), cell(q.q_hi)};
    for (double p : cfg.p) row.push_back(cell(lp_correct_factor(q.q_hi, seq[k].area(), p)));
    row.push_back(cell(running));
    csv.row(row);
  }

  Json j = Json::object();
  j["command"] = "correct-factors";
  j["sequence"] = seq.source;
  j["terms"] = n;
  Json v = Json::object();
  if (verdict.kind == GrowthVerdict::Kind::Linear) {
    v["kind"] = "LINEAR";
    v["C"] = verdict.constant;
    v["argmax_k"] = verdict.argmax_k;
  } else {
    v["kind"] = "UNBOUNDED";
    v["witness"] = {{"k", verdict.witness_k}, {"l", verdict.witness_l}, {"ratio", verdict.witness_ratio}};
    v["growth_cap"] = cfg.growth_cap;
  }
  j["verdict"] = v;
  j["alpha_star"] = nest.alpha ? Json(*nest.alpha) : Json(nullptr);
  j["alpha_pair"] = {nest.k, nest.l};
  j["lemma_linear"] = {{"growth_constant", lemma.growth_constant},
                       {"alpha_star", lemma.alpha_star},
                       {"premise_holds", lemma.premise_holds},
                       {"alpha_bound_holds", lemma.alpha_bound_holds},
                       {"area_bound_holds", lemma.area_bound_holds},
                       {"worst_area_ratio", lemma.worst_area_ratio}};
  const bool ok = !lemma.premise_holds || (lemma.alpha_bound_holds && lemma.area_bound_holds);
  j["pass"] = ok;
  j["config"] = config_json(cfg);
  write_outputs(out, "correct_factors", csv, j, cfg);

  if (verdict.kind == GrowthVerdict::Kind::Linear) {
    log << "correct-factors: " << seq.source << " LINEAR C = " << format_number(verdict.constant) << "\n";
  } else {
    log << "correct-factors: " << seq.source << " UNBOUNDED witness (" << verdict.witness_k << ", "
        << verdict.witness_l << ") ratio " << format_number(verdict.witness_ratio) << "\n";
  }
  return ok ? kOk : kAssertion;
}

int cmd_perron(const Config& cfg, const fs::path& out, std::ostream& log) {
  const SlopeSequence b = cfg.slope_sequence();
  const std::vector<PerronBlock> blocks = build_blocks(b, cfg.block_lo, cfg.block_hi, schedule_of(cfg));
  CsvTable csv({"n", "eps", "bound", "alpha_eff", "max_level_ratio", "G", "within_G", "regime_ok", "area_original",
                "area_translated"});
  bool ok = true;
  for (const PerronBlock& blk : blocks) {
    double max_ratio = 0.0;
    for (double r : blk.level_max_ratio) max_ratio = std::max(max_ratio, r);
    csv.row({cell(blk.n), cell(blk.eps_measured), cell(blk.eps_bound), cell(blk.alpha_eff), cell(max_ratio),
             cell(blk.G), cell(blk.levels_within_G()), cell(blk.pairing_regime_ok), cell(blk.area_original),
             cell(blk.area_translated)});
    if (blk.pairing_regime_ok && blk.eps_measured > blk.eps_bound * (1.0 + 1e-12)) ok = false;
    if (cfg.svg) write_file(out / ("block_" + std::to_string(blk.n) + ".svg"), block_svg(b, blk));
    log << "perron: n = " << blk.n << " eps = " << format_number(blk.eps_measured) << "\n";
  }
  write_file(out / "perron.csv", csv.str());
  write_file(out / "config.txt", cfg.dump());
  return ok ? kOk : kAssertion;
}

int cmd_thm2(const Config& cfg, const fs::path& out, std::ostream& log) {
  const SlopeSequence b = cfg.slope_sequence();
  Thm2Config tc;
  tc.delta_rule = cfg.delta;
  tc.n_lo = cfg.block_lo;
  tc.n_hi = cfg.block_hi;
  tc.resolution = cfg.resolution > 0 ? cfg.resolution : 2048;
  tc.schedule = schedule_of(cfg);
  tc.probes = cfg.probes;
  tc.seed = cfg.seed;
  tc.growth_cap = cfg.growth_cap;
  const Thm2Result r = thm2_experiment(b, tc);

  CsvTable csv({"n", "t0", "eps_n", "eps_bound", "ratio_measured", "raster_err", "ratio_floor", "inv_9eps",
                "v_over_union", "area_v", "area_k", "n_cols", "n_rows", "kernels", "probe_min_ratio",
                "probe_max_excess", "sound"});
  Json rows = Json::array();
  for (const ExperimentRow& e : r.rows) {
    csv.row({cell(e.n), cell(e.t0), cell(e.eps_n), cell(e.eps_bound), cell(e.ratio_measured), cell(e.raster_err),
             cell(e.ratio_floor), cell(e.inv_9eps), cell(e.v_over_union), cell(e.area_v), cell(e.area_k),
             cell(e.n_cols), cell(e.n_rows), cell(e.kernels), cell(e.probe_min_ratio), cell(e.probe_max_excess),
             cell(e.sound)});
    rows.push_back({{"n", e.n},
                    {"eps_n", e.eps_n},
                    {"eps_bound", e.eps_bound},
                    {"ratio_measured", e.ratio_measured},
                    {"raster_err", e.raster_err},
                    {"ratio_floor", e.ratio_floor},
                    {"inv_9eps", e.inv_9eps},
                    {"v_over_union", e.v_over_union},
                    {"grid", {e.n_cols, e.n_rows}},
                    {"probe_min_ratio", e.probe_min_ratio},
                    {"probe_max_excess", e.probe_max_excess},
                    {"sound", e.sound}});
    log << "thm2: n = " << e.n << " floor = " << format_number(e.ratio_floor)
        << " measured = " << format_number(e.ratio_measured) << (e.sound ? "" : "  UNSOUND") << "\n";
  }
  Json j = Json::object();
  j["command"] = "thm2";
  j["slopes"] = b.description();
  j["c_star"] = r.c_star;
  j["G"] = r.G;
  j["t0"] = r.t0;
  j["admissible"] = r.admissible;
  j["warning"] = r.warning;
  j["sound"] = r.sound;
  j["rows"] = rows;
  j["config"] = config_json(cfg);
  write_outputs(out, "thm2", csv, j, cfg);
  if (!r.warning.empty()) log << "thm2: warning: " << r.warning << "\n";
  return r.sound ? kOk : kAssertion;
}

int cmd_weaktype(const Config& cfg, const fs::path& out, std::ostream& log) {
  WeakTypeConfig wc;
  wc.families = cfg.families;
  wc.functions = cfg.functions;
  wc.resolution = cfg.resolution > 0 ? cfg.resolution : 512;
  wc.ps = cfg.p;
  wc.lambdas = cfg.lambda;
  wc.seed = cfg.seed;
  for (const std::string& f : wc.families) {
    try {
      (void)weak_type_family(f);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const auto results = weak_type_experiment(wc);

  CsvTable csv({"family", "function", "p", "lambda", "measured", "err", "bound", "pass"});
  Json fams = Json::array();
  bool ok = true;
  for (const WeakTypeFamilyResult& fr : results) {
    std::size_t failures = 0;
    for (std::size_t i = 0; i < fr.reports.size(); ++i) {
      for (const WeakTypeLine& l : fr.reports[i].lines) {
        csv.row({fr.family, cell(i), cell(l.p), cell(l.lambda), cell(l.measured), cell(l.err), cell(l.bound),
                 cell(l.pass)});
        if (!l.pass) ++failures;
      }
    }
    fams.push_back({{"family", fr.family},
                    {"terms", fr.terms},
                    {"grid", {fr.n_cols, fr.n_rows}},
                    {"functions", fr.reports.size()},
                    {"failures", failures},
                    {"worst_slack", fr.worst_slack},
                    {"pass", fr.pass}});
    ok = ok && fr.pass;
    log << "weaktype: " << fr.family << (fr.pass ? " PASS" : " FAIL") << " worst slack "
        << format_number(fr.worst_slack) << "\n";
  }
  Json j = Json::object();
  j["command"] = "weaktype";
  j["margin"] = wc.margin;
  j["families"] = fams;
  j["pass"] = ok;
  j["config"] = config_json(cfg);
  write_outputs(out, "weaktype", csv, j, cfg);
  return ok ? kOk : kAssertion;
}

int cmd_lemma72(const Config& cfg, const fs::path& out, std::ostream& log) {
  if (cfg.samples < 100) throw UsageError("samples: at least 100");
  CsvTable csv({"b", "c", "alpha_loc", "samples", "min_ratio", "argmin_x", "argmin_y", "bound", "ratio_b_prime",
                "ratio_c_prime", "holds"});
  Json kits = Json::array();
  bool ok = true;
  for (double b : cfg.kit_b) {
    for (double gap : cfg.kit_gap) {
      if (!(b >= 0.0) || !(gap > 0.0)) throw UsageError("kit_b must be >= 0 and kit_gap > 0");
      const TriangleKit kit = companion_rect(b, b + gap);
      const IntersectionReport r = verify_intersection_bound(kit, cfg.samples, cfg.seed);
      const bool corner = std::abs(r.ratio_at_off_axis - 1.0 / 72.0) <= 1e-9;
      csv.row({cell(b), cell(b + gap), cell(kit.alpha_loc), cell(r.samples), cell(r.min_ratio), cell(r.argmin.x),
               cell(r.argmin.y), cell(r.bound), cell(r.ratio_at_off_axis), cell(r.ratio_at_on_axis),
               cell(r.holds && corner)});
      kits.push_back({{"b", b},
                      {"c", b + gap},
                      {"alpha_loc", kit.alpha_loc},
                      {"min_ratio", r.min_ratio},
                      {"bound", r.bound},
                      {"ratio_b_prime", r.ratio_at_off_axis},
                      {"holds", r.holds && corner}});
      ok = ok && r.holds && corner;
    }
  }
  Json j = Json::object();
  j["command"] = "lemma72";
  j["kits"] = kits;
  j["pass"] = ok;
  j["config"] = config_json(cfg);
  write_outputs(out, "lemma72", csv, j, cfg);
  log << "lemma72: " << kits.size() << " kits " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kOk : kAssertion;
}

int cmd_lpgood(const Config& cfg, const fs::path& out, std::ostream& log) {
  const std::size_t K = cfg.lpgood_blocks;
  if (K < 1 || K > 24) throw UsageError("lpgood_blocks: expected 1..24");
  const LpGoodFamily fam = lpgood_family(lpgood_lambdas(K), K, cfg.chain_alpha);

  CsvTable pairs({"k", "i", "j", "formula", "measured", "ratio", "witness"});
  for (const LpGoodPair& p : fam.pairs) {
    pairs.row({cell(p.k), cell(p.i), cell(p.j), cell(p.formula), cell(p.measured), cell(p.ratio),
               cell(p.ratio >= std::ldexp(1.0, static_cast<int>(p.j - p.i)))});
  }
  CsvTable chains({"k", "terms", "chains", "k_over_4"});
  for (std::size_t k = 0; k < fam.chains.size(); ++k) {
    const std::size_t terms = (k + 1) * (k + 2) / 2;
    chains.row({cell(k), cell(terms), cell(fam.chains[k]), cell(static_cast<double>(k) / 4.0)});
  }
  const bool chains_ok = static_cast<double>(fam.chains.back()) >= static_cast<double>(K) / 4.0;
  const bool ok = fam.max_formula_err <= 1e-9 && fam.witness_holds && chains_ok;

  Json j = Json::object();
  j["command"] = "lpgood";
  j["blocks"] = K;
  j["terms"] = fam.seq.size();
  j["pairs"] = fam.pairs.size();
  j["max_formula_err"] = fam.max_formula_err;
  j["witness_holds"] = fam.witness_holds;
  j["chain_alpha"] = fam.chain_alpha;
  j["chains"] = fam.chains;
  j["chains_at_least_k_over_4"] = chains_ok;
  j["pass"] = ok;
  j["config"] = config_json(cfg);
  write_file(out / "lpgood_pairs.csv", pairs.str());
  write_file(out / "lpgood_chains.csv", chains.str());
  write_file(out / "lpgood.json", json_text(j));
  write_file(out / "config.txt", cfg.dump());
  log << "lpgood: max formula error " << format_number(fam.max_formula_err) << ", chains at k = " << K << ": "
      << fam.chains.back() << (ok ? " PASS" : " FAIL") << "\n";
  return ok ? kOk : kAssertion;
}

int run_command(const std::string& name, const Config& cfg, const fs::path& out, std::ostream& log) {
  if (name == "correct-factors") return cmd_correct_factors(cfg, out, log);
  if (name == "perron") return cmd_perron(cfg, out, log);
  if (name == "thm2") return cmd_thm2(cfg, out, log);
  if (name == "weaktype") return cmd_weaktype(cfg, out, log);
  if (name == "lemma72") return cmd_lemma72(cfg, out, log);
  if (name == "lpgood") return cmd_lpgood(cfg, out, log);
  throw UsageError("unknown command '" + name + "'");
}

}  // namespace perronlab::cli
