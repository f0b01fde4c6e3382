#pragma once

#include <ostream>

namespace csa::cli {

/// Exit codes of the `csa` tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitNoContact = 2;

/// Entry point of the `csa` command line, with injectable streams for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace csa::cli
