// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace systemic::cli {

inline constexpr const char* kSchemaVersion = "1.0.0";

enum ExitCode : int { ok = 0, finding = 1, input_error = 2, numerical_failure = 3 };

/// Runs one invocation. `args` excludes the program name. JSON reports (or
/// CSV / edge lists for `sweep` and `generate`) go to `out`, diagnostics to
/// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace systemic::cli
