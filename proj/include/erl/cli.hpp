#pragma once

#include <iosfwd>

namespace erl {

// Entry point of the `erl` tool. Returns the process exit code:
// 0 success, 2 configuration error, 3 backend or infrastructure error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace erl
