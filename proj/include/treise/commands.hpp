#pragma once

#include <string>

#include "treise/config.hpp"

namespace treise {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitInternalError = 4;
inline constexpr int kExitNoopWarning = 10;

int cmd_generate(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_attribute(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg);
int cmd_bench(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg);

/// Runs one subcommand with the exit-code contract: 0 success, 2 config
/// errors, 3 data errors, 4 internal failures, 10 explicit no-op warnings.
int dispatch_command(const std::string& name, const RunConfig& cfg);

}  // namespace treise
