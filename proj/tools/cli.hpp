#pragma once

#include <iosfwd>

namespace cocomo::cli {

/// Entry point shared by the `cocomo` binary and the tests. Machine output
/// goes to `out` (or to files), diagnostics to `err`.
///
/// Exit codes: 0 success, 1 usage/parse/validation error, 2 deadlock.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cocomo::cli
