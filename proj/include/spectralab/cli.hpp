#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spectralab::cli {

enum ExitCode { Ok = 0, BoundViolated = 1, InputFailure = 2, SolverFailure = 3 };

/// `args` excludes the program name. Reports go to `out` unless --out is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

std::string version();

}  // namespace spectralab::cli
