#pragma once

#include <iosfwd>

namespace dgocp::cli {

/// Exit codes of the command-line front end.
inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_stall = 3;

/// Entry point for `dgocp solve | convergence | verify`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dgocp::cli
