#ifndef AFFECT_TOOLS_CLI_H_
#define AFFECT_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace affect::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternal = 2;

// Runs `affect-tree` with `args` (program name excluded). Results go to
// `out`, diagnostics to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace affect::cli

#endif  // AFFECT_TOOLS_CLI_H_
