#pragma once

#include <iosfwd>

namespace crtower {

/// Subcommands tower, window, oracle and sweep. Returns 0 on success, 1 on
/// bad input, 2 when a computation fails.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crtower
