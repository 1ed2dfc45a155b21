#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace nanophase::cli {

/// Runs one command line (without the program name). Artifacts go to --out; the
/// summary goes to `out` and a single machine-readable line to `err` on failure.
/// Returns the process exit status: 0, 2 input, 3 numerical, 4 insufficient data.
int run_pipeline(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace nanophase::cli
