// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: config ingestion, subcommand dispatch, CSV/JSON
// emission and run manifests.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace excursion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Runs one CLI invocation. `args` excludes the program name. Data goes to
/// `out` when the output path is "-", diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace excursion::cli
