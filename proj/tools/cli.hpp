#ifndef SALB_TOOLS_CLI_HPP
#define SALB_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace salb::cli {

enum ExitCode { exit_ok = 0, exit_error = 1, exit_infeasible = 2, exit_limit = 3 };

/// args excludes the program name. Log level comes from SALB_LOG unless
/// log_level is non-empty.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::string& log_level = {});

}  // namespace salb::cli

#endif  // SALB_TOOLS_CLI_HPP
