#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "perronlab/maximal.hpp"

namespace {

using namespace perronlab::cli;

struct Flags {
  std::string config;
  std::string out = "perronlab-out";
  std::map<std::string, std::string> overrides;
};

void add_flags(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config, "Key file; flags override its keys");
  sub->add_option("--out", flags.out, "Output directory")->capture_default_str();
  for (const char* key : {"resolution", "seed", "blocks", "p", "lambda"}) {
    sub->add_option_function<std::string>(
        std::string("--") + key, [&flags, key](const std::string& v) { flags.overrides[key] = v; },
        std::string("Overrides the '") + key + "' key");
  }
}

void check_threads_env() {
  const char* env = std::getenv("PERRONLAB_THREADS");
  if (env == nullptr) return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*env == '\0' || *end != '\0' || v < 1) throw UsageError("PERRONLAB_THREADS must be a positive integer");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perron-tree and rectangle differentiation experiments"};
  app.require_subcommand(1);
  Flags flags;
  for (const std::string& name : command_names()) add_flags(app.add_subcommand(name), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    check_threads_env();
    Config cfg;
    std::map<std::string, std::string> kv;
    if (!flags.config.empty()) kv = read_key_file(flags.config);
    for (const auto& [k, v] : flags.overrides) kv[k] = v;
    apply_keys(cfg, kv);
    const std::string name = app.get_subcommands().front()->get_name();
    return run_command(name, cfg, flags.out, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const perronlab::HypothesisError& e) {
    std::cerr << "hypothesis refused: " << e.what() << "\n";
    return kRefused;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAssertion;
  }
}
