#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace memwalk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitAbort = 2;
inline constexpr int kExitUsage = 64;

/// simulate, ensemble, validate, mixing, variational, control-path, reproduce-fig1
const std::vector<std::string>& subcommands();

std::string usage_text();

/// Runs `args` (without the program name): subcommand first, then flags.
/// Exit status: 0 success, 1 invalid config or failed validation, 2 runtime abort,
/// 64 unknown subcommand or bad flags.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace memwalk::cli
