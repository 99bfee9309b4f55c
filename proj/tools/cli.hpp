#pragma once

#include <iosfwd>

namespace screeneval::cli {

/// Runs one invocation of the screeneval command line.
/// Exit codes: 0 success, 1 data or validation error, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace screeneval::cli
