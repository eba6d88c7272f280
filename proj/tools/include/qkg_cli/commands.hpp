#pragma once

#include "qkg_cli/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qkg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPrecondition = 3;

const std::vector<std::string>& subcommands();

// Runs one subcommand, writing <out>/<name>.json, its CSV tables and
// <out>/manifest.json. Returns the process exit code.
int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& log);

}  // namespace qkg::cli
