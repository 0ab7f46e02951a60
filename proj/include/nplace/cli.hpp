#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nplace {

inline constexpr const char* tool_name = "nplace";
inline constexpr const char* tool_version = "1.0.0";

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_input_error = 1,
    exit_refuted = 2,
    exit_unreachable = 3,
    exit_solver_failure = 4,
};

/// Runs one command. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nplace
