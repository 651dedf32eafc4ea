#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hdes::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;    // usage, parse error, missing file, empty directory
inline constexpr int kRuntimeError = 3;  // solver/validation failure, unsupported reference

/// Runs `hdes <command> ...`; args excludes the program name. Data goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hdes::cli
