#pragma once

#include <iosfwd>

namespace fishpart::cli {

/// Parses arguments and dispatches to a subcommand; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fishpart::cli
