#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsad::cli {

/// Entry point shared by the `tsad` binary and the tests. `args` excludes the
/// program name. Returns the process exit code: 0 success, 1 usage error,
/// 2 data/schema error, 3 internal invariant violation.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tsad::cli
