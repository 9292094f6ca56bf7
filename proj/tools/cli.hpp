#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace daecert::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kInfeasible = 2,
  kNumericalFailure = 3,
  kStageFailure = 4,
};

/// Runs one command.  `args` excludes the program name.  Reports go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Default solver tolerance: DAE_CERTIFY_SOLVER_TOL when set and valid,
/// otherwise 1e-8.
double default_solver_tol();

}  // namespace daecert::cli
