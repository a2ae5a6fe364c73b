#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "output.hpp"

namespace perronlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError("config key '" + key + "': '" + s + "' is not a number");
  }
  return v;
}

template <typename Int>
Int to_int(const std::string& s, const std::string& key) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("config key '" + key + "': '" + s + "' is not a non-negative integer");
  }
  return v;
}

bool to_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw UsageError("config key '" + key + "': expected true or false");
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_shortest(v[i]);
  return s;
}

}  // namespace

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) throw UsageError("config key '" + key + "': empty list entry");
    out.push_back(to_double(item, key));
  }
  if (out.empty()) throw UsageError("config key '" + key + "': empty list");
  return out;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto n = to_int<std::size_t>(trim(text), "blocks");
    return {n, n};
  }
  const auto lo = to_int<std::size_t>(trim(text.substr(0, dots)), "blocks");
  const auto hi = to_int<std::size_t>(trim(text.substr(dots + 2)), "blocks");
  if (lo > hi) throw UsageError("blocks: empty range " + text);
  if (hi > 16) throw UsageError("blocks: at most 16");
  return {lo, hi};
}

std::map<std::string, std::string> read_key_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_keys(Config& cfg, const std::map<std::string, std::string>& kv) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"slopes", [&](auto& k, auto& v) {
         if (v.empty()) throw UsageError("config key '" + k + "': no slope generator given");
         cfg.slopes = v;
       }},
      {"prefix", [&](auto& k, auto& v) { cfg.prefix = to_int<std::size_t>(v, k); }},
      {"delta", [&](auto&, auto& v) { cfg.delta = v; }},
      {"blocks", [&](auto&, auto& v) { std::tie(cfg.block_lo, cfg.block_hi) = parse_range(v); }},
      {"resolution", [&](auto& k, auto& v) { cfg.resolution = to_int<int>(v, k); }},
      {"alpha", [&](auto&, auto& v) { cfg.alpha = v; }},
      {"seed", [&](auto& k, auto& v) { cfg.seed = to_int<std::uint64_t>(v, k); }},
      {"p", [&](auto& k, auto& v) { cfg.p = parse_list(v, k); }},
      {"lambda", [&](auto& k, auto& v) { cfg.lambda = parse_list(v, k); }},
      {"sequence", [&](auto&, auto& v) { cfg.sequence = v; }},
      {"length", [&](auto& k, auto& v) { cfg.length = to_int<std::size_t>(v, k); }},
      {"samples", [&](auto& k, auto& v) { cfg.samples = to_int<std::size_t>(v, k); }},
      {"kit_b", [&](auto& k, auto& v) { cfg.kit_b = parse_list(v, k); }},
      {"kit_gap", [&](auto& k, auto& v) { cfg.kit_gap = parse_list(v, k); }},
      {"functions", [&](auto& k, auto& v) { cfg.functions = to_int<std::size_t>(v, k); }},
      {"families", [&](auto&, auto& v) { cfg.families = split(v, ','); }},
      {"lpgood_blocks", [&](auto& k, auto& v) { cfg.lpgood_blocks = to_int<std::size_t>(v, k); }},
      {"chain_alpha", [&](auto& k, auto& v) { cfg.chain_alpha = to_double(v, k); }},
      {"probes", [&](auto& k, auto& v) { cfg.probes = to_int<std::size_t>(v, k); }},
      {"growth_cap", [&](auto& k, auto& v) { cfg.growth_cap = to_double(v, k); }},
      {"svg", [&](auto& k, auto& v) { cfg.svg = to_bool(v, k); }},
  };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw UsageError("unknown config key '" + key + "'");
    it->second(key, value);
  }
  for (double p : cfg.p) {
    if (!(p >= 1.0)) throw UsageError("p values must be >= 1");
  }
  for (double l : cfg.lambda) {
    if (!(l > 0.0)) throw UsageError("lambda values must be positive");
  }
  try {
    (void)AlphaSchedule::parse(cfg.alpha);
  } catch (const std::exception& e) {
    throw UsageError(std::string("alpha: ") + e.what());
  }
}

SlopeSequence Config::slope_sequence() const {
  const std::size_t need = std::max({prefix, std::size_t{2} << block_hi, kMinGeneratedPrefix});
  try {
    if (slopes.rfind("power:", 0) == 0) return SlopeSequence::power(to_double(slopes.substr(6), "slopes"), need);
    if (slopes.rfind("geometric:", 0) == 0) {
      const double r = to_double(slopes.substr(10), "slopes");
      if (!(r > 1.0)) throw UsageError("slopes: geometric ratio must exceed 1");
      std::vector<double> v(need);
      for (std::size_t k = 0; k < need; ++k) v[k] = std::pow(r, static_cast<double>(k)) - 1.0;
      return SlopeSequence::explicit_values(std::move(v));
    }
    if (slopes.rfind("list:", 0) == 0) return SlopeSequence::explicit_values(parse_list(slopes.substr(5), "slopes"));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(std::string("slopes: ") + e.what());
  }
  throw UsageError("slopes: expected power:S, geometric:R or list:b0,b1,...");
}

std::string Config::dump() const {
  std::ostringstream o;
  std::string fams;
  for (std::size_t i = 0; i < families.size(); ++i) fams += (i ? "," : "") + families[i];
  o << "slopes = " << slopes << "\n"
    << "prefix = " << prefix << "\n"
    << "delta = " << delta << "\n"
    << "blocks = " << block_lo << ".." << block_hi << "\n"
    << "resolution = " << resolution << "\n"
    << "alpha = " << alpha << "\n"
    << "seed = " << seed << "\n"
    << "p = " << join(p) << "\n"
    << "lambda = " << join(lambda) << "\n"
    << "sequence = " << sequence << "\n"
    << "length = " << length << "\n"
    << "samples = " << samples << "\n"
    << "kit_b = " << join(kit_b) << "\n"
    << "kit_gap = " << join(kit_gap) << "\n"
    << "functions = " << functions << "\n"
    << "families = " << fams << "\n"
    << "lpgood_blocks = " << lpgood_blocks << "\n"
    << "chain_alpha = " << format_shortest(chain_alpha) << "\n"
    << "probes = " << probes << "\n"
    << "growth_cap = " << format_shortest(growth_cap) << "\n"
    << "svg = " << (svg ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace perronlab::cli
