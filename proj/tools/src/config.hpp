#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "perronlab/perron.hpp"

namespace perronlab::cli {

/// Bad flag, key or value; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generated slope prefixes are at least this long so that the hypothesis
/// estimates see enough terms even for small block ranges.
inline constexpr std::size_t kMinGeneratedPrefix = 64;

/// Every experiment knob. Defaults reproduce the reference runs.
struct Config {
  std::string slopes = "power:1";      // power:S | geometric:R | list:b0,b1,...
  std::size_t prefix = 0;              // generated slope count; at least 64 and what the blocks need
  std::string delta = "geometric:0.25";
  std::size_t block_lo = 2;
  std::size_t block_hi = 6;
  int resolution = 0;                  // 0 = command default
  std::string alpha = "optimal";
  std::uint64_t seed = 1;
  std::vector<double> p{1.0, 1.5, 2.0};
  std::vector<double> lambda{0.1, 0.3, 0.9};
  std::string sequence = "nested-similar";  // nested-similar | constant | lpgood | process
  std::size_t length = 12;
  std::size_t samples = 10000;
  std::vector<double> kit_b{0.0, 0.5, 1.0, 3.0};
  std::vector<double> kit_gap{0.25, 1.0, 2.0};
  std::size_t functions = 50;
  std::vector<std::string> families{"nested-similar", "thm2-prefix", "lpgood-prefix"};
  std::size_t lpgood_blocks = 12;
  double chain_alpha = 4.0;
  std::size_t probes = 16;
  double growth_cap = 64.0;
  bool svg = true;

  /// Slope prefix long enough for blocks block_lo..block_hi (and `prefix`).
  SlopeSequence slope_sequence() const;
  /// Key = value lines in the file format, in a fixed order.
  std::string dump() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys and
/// malformed values throw UsageError.
std::map<std::string, std::string> read_key_file(const std::string& path);

/// Applies key/value pairs on top of `cfg`.
void apply_keys(Config& cfg, const std::map<std::string, std::string>& kv);

std::vector<double> parse_list(const std::string& text, const std::string& key);
std::pair<std::size_t, std::size_t> parse_range(const std::string& text);

}  // namespace perronlab::cli
