#pragma once

// Command-line front end: frames, sample, check, sweep.

#include "gausslm/functions.hpp"
#include "gausslm/verify.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gausslm {

/// Exit codes for `check`; sweeps exit kViolated iff a verdict is VIOLATED.
inline constexpr int kExitHolds = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitIndeterminate = 3;
inline constexpr int kExitVacuous = 4;

/// VIOLATED > INDETERMINATE > VACUOUS > HOLDS. ERROR maps to kExitInvalid.
int exit_code(const std::vector<InequalityVerdict>& verdicts);

/// Parses `gauss:A=<scalar|[diag]|@file>,a=<scalar|[list]>,c=<scalar>[,k=<int>]`,
/// `builtin:<name>[,key=value...]` or `@file.json` / `file.json`.
FunctionModel parse_function_spec(const std::string& spec);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gausslm
