#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "perronlab/correct_factors.hpp"

namespace perronlab::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kRefused = 3, kAssertion = 4 };

/// Subcommand names in help order.
const std::vector<std::string>& command_names();

/// Runs one experiment, writes its files under `out` and a summary to `log`.
/// Returns kOk or kAssertion; usage problems and hypothesis refusals are
/// thrown (UsageError, HypothesisError).
int run_command(const std::string& name, const Config& cfg, const std::filesystem::path& out, std::ostream& log);

int cmd_correct_factors(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_perron(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_thm2(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_weaktype(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_lemma72(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_lpgood(const Config& cfg, const std::filesystem::path& out, std::ostream& log);

/// The rectangle sequence named by cfg.sequence.
RectSequence config_sequence(const Config& cfg);

}  // namespace perronlab::cli
