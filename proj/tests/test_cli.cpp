#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"
#include "perronlab/maximal.hpp"

using namespace perronlab;
using namespace perronlab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("perronlab_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Config with(const std::map<std::string, std::string>& kv) {
  Config c;
  apply_keys(c, kv);
  return c;
}

}  // namespace

TEST(Output, NumbersRoundTripWithSeventeenDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(-2.5e-20), "-2.4999999999999999e-20");
  EXPECT_EQ(format_number(INFINITY), "inf");
  EXPECT_EQ(format_shortest(0.1), "0.1");
  for (double v : {1.0 / 3.0, 2.0 / 7.0, 1e300, 6.02214076e23}) EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Output, CsvQuotesOnlyWhenNeeded) {
  CsvTable t({"a", "b"});
  t.row({"plain", "has,comma"}).row({"say \"hi\"", "two\nlines"});
  EXPECT_EQ(t.str(), "a,b\r\nplain,\"has,comma\"\r\n\"say \"\"hi\"\"\",\"two\nlines\"\r\n");
  EXPECT_THROW(t.row({"x"}), std::logic_error);
}

TEST(Output, JsonUsesFixedNumberFormat) {
  Json j = Json::object();
  j["x"] = 0.1;
  j["n"] = 3;
  j["bad"] = NAN;
  j["list"] = {1.5, 2};
  j["empty"] = Json::array();
  EXPECT_EQ(json_text(j),
            "{\n  \"x\": 0.10000000000000001,\n  \"n\": 3,\n  \"bad\": null,\n  \"list\": [\n    1.5,\n    2\n  ],\n"
            "  \"empty\": []\n}\n");
  EXPECT_EQ(Json::parse(json_text(j))["x"].get<double>(), 0.1);
}

TEST(Config, KeyFileAndOverrides) {
  const fs::path dir = scratch("keys");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg");
    f << "# comment\nslopes = power:2   # trailing\n\nblocks = 3..5\np = 1, 2\n";
  }
  auto kv = read_key_file((dir / "run.cfg").string());
  kv["blocks"] = "1..2";
  const Config c = with(kv);
  EXPECT_EQ(c.slopes, "power:2");
  EXPECT_EQ(c.block_lo, 1u);
  EXPECT_EQ(c.block_hi, 2u);
  EXPECT_EQ(c.p, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(c.lambda, (std::vector<double>{0.1, 0.3, 0.9}));
}

TEST(Config, DumpReadsBack) {
  const Config c = with({{"lambda", "0.25,0.5"}, {"seed", "17"}, {"families", "thm2-prefix"}});
  const fs::path dir = scratch("dump");
  fs::create_directories(dir);
  std::ofstream(dir / "c.cfg") << c.dump();
  const Config back = with(read_key_file((dir / "c.cfg").string()));
  EXPECT_EQ(back.dump(), c.dump());
  EXPECT_EQ(back.seed, 17u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(with({{"colour", "red"}}), UsageError);
  EXPECT_THROW(with({{"slopes", ""}}), UsageError);
  EXPECT_THROW(with({{"p", "0.5"}}), UsageError);
  EXPECT_THROW(with({{"lambda", "0,1"}}), UsageError);
  EXPECT_THROW(with({{"resolution", "12x"}}), UsageError);
  EXPECT_THROW(with({{"blocks", "5..2"}}), UsageError);
  EXPECT_THROW(with({{"alpha", "sometimes"}}), UsageError);
  EXPECT_THROW(read_key_file("/nonexistent/perronlab.cfg"), UsageError);
  EXPECT_THROW(with({{"slopes", "spiral:3"}}).slope_sequence(), UsageError);
}

TEST(Config, SlopeGenerators) {
  const SlopeSequence b = with({{"blocks", "1..3"}}).slope_sequence();
  EXPECT_EQ(b.size(), kMinGeneratedPrefix);
  EXPECT_EQ(with({{"blocks", "1..6"}}).slope_sequence().size(), 128u);
  EXPECT_EQ(b[5], 5.0);
  const SlopeSequence g = with({{"slopes", "geometric:2"}, {"blocks", "1..2"}}).slope_sequence();
  EXPECT_EQ(g[3], 7.0);
  const SlopeSequence l = with({{"slopes", "list:0,1,3"}}).slope_sequence();
  EXPECT_EQ(l.size(), 3u);
}

TEST(Commands, NestedSimilarIsLinearWithFour) {
  const fs::path out = scratch("cf");
  std::ostringstream log;
  EXPECT_EQ(cmd_correct_factors(Config{}, out, log), kOk);
  const Json j = Json::parse(slurp(out / "correct_factors.json"));
  EXPECT_EQ(j["verdict"]["kind"], "LINEAR");
  EXPECT_NEAR(j["verdict"]["C"].get<double>(), 4.0, 1e-9);
  EXPECT_NEAR(j["alpha_star"].get<double>(), 2.0, 1e-9);
  const std::string csv = slurp(out / "correct_factors.csv");
  EXPECT_EQ(csv.substr(0, csv.find("\r\n")), "k,area,q_lo,q_hi,W_1,W_1.5,W_2,alpha_star_running");
}

TEST(Commands, LpGoodSequenceIsUnbounded) {
  const fs::path out = scratch("cflp");
  std::ostringstream log;
  EXPECT_EQ(cmd_correct_factors(with({{"sequence", "lpgood"}}), out, log), kOk);
  const Json j = Json::parse(slurp(out / "correct_factors.json"));
  EXPECT_EQ(j["verdict"]["kind"], "UNBOUNDED");
  EXPECT_GT(j["verdict"]["witness"]["ratio"].get<double>(), 64.0);
  EXPECT_LT(j["verdict"]["witness"]["k"].get<int>(), j["verdict"]["witness"]["l"].get<int>());
}

TEST(Commands, EmptySequenceIsUsageError) {
  std::ostringstream log;
  EXPECT_THROW(cmd_correct_factors(with({{"length", "0"}}), scratch("empty"), log), UsageError);
}

TEST(Commands, PerronForcedHalfGivesThreeQuarters) {
  const fs::path out = scratch("perron");
  std::ostringstream log;
  EXPECT_EQ(cmd_perron(with({{"alpha", "constant:0.5"}, {"blocks", "0..1"}}), out, log), kOk);
  const std::string csv = slurp(out / "perron.csv");
  EXPECT_NE(csv.find("\r\n0,1,"), std::string::npos);
  EXPECT_NE(csv.find("\r\n1,0.75,"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "block_1.svg"));
  EXPECT_EQ(slurp(out / "block_1.svg").rfind("<?xml", 0), 0u);
}

TEST(Commands, Thm2RefusesGeometricSlopes) {
  std::ostringstream log;
  EXPECT_THROW(cmd_thm2(with({{"slopes", "geometric:2"}, {"blocks", "2..3"}}), scratch("geo"), log), HypothesisError);
}

TEST(Commands, Thm2FloorIncreases) {
  const fs::path out = scratch("thm2");
  std::ostringstream log;
  EXPECT_EQ(cmd_thm2(with({{"blocks", "2..4"}, {"resolution", "512"}, {"probes", "4"}}), out, log), kOk);
  const Json j = Json::parse(slurp(out / "thm2.json"));
  ASSERT_EQ(j["rows"].size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_GT(j["rows"][i]["ratio_floor"].get<double>(), j["rows"][i - 1]["ratio_floor"].get<double>());
  }
  EXPECT_TRUE(j["sound"].get<bool>());
  EXPECT_EQ(j["warning"], "");
}

TEST(Commands, Thm2FlagsNonAdmissibleDelta) {
  const fs::path out = scratch("thm2na");
  std::ostringstream log;
  EXPECT_EQ(cmd_thm2(with({{"blocks", "2..3"}, {"resolution", "512"}, {"probes", "2"}, {"delta", "list:1,1,1,1"}}),
                     out, log),
            kOk);
  const Json j = Json::parse(slurp(out / "thm2.json"));
  EXPECT_FALSE(j["admissible"].get<bool>());
  EXPECT_NE(j["warning"].get<std::string>(), "");
}

TEST(Commands, Lemma72AndLpGoodPass) {
  std::ostringstream log;
  const Config c = with({{"samples", "500"}, {"kit_b", "0,1"}, {"kit_gap", "1"}, {"lpgood_blocks", "8"}});
  EXPECT_EQ(cmd_lemma72(c, scratch("l72"), log), kOk);
  EXPECT_EQ(cmd_lpgood(c, scratch("lpg"), log), kOk);
  EXPECT_THROW(cmd_lemma72(with({{"samples", "10"}}), scratch("l72b"), log), UsageError);
}

TEST(Commands, WeakTypeRejectsUnknownFamily) {
  std::ostringstream log;
  EXPECT_THROW(cmd_weaktype(with({{"families", "spiral"}}), scratch("wt"), log), UsageError);
}

TEST(Commands, OutputsAreByteIdentical) {
  const Config c = with({{"blocks", "2..3"}, {"resolution", "512"}, {"probes", "4"}, {"samples", "300"},
                         {"functions", "2"}, {"families", "nested-similar"}, {"lpgood_blocks", "6"}});
  std::ostringstream log;
  for (const std::string& name : command_names()) {
    const fs::path a = scratch("det_a_" + name), b = scratch("det_b_" + name);
    ASSERT_EQ(run_command(name, c, a, log), kOk) << name;
    ASSERT_EQ(run_command(name, c, b, log), kOk) << name;
    for (const auto& entry : fs::directory_iterator(a)) {
      EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << name << " " << entry.path().filename();
    }
  }
}
