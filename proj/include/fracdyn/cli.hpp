#pragma once

// Command-line front end. Exposed as a library entry point so the test
// suites can drive every subcommand in-process and check artifacts and
// exit codes.
//
// Exit codes: 0 success, 1 usage/config error, 2 solver non-convergence or
// blow-up, 3 FAIL verdict (verify-uh).

#include <string>
#include <vector>

#include "fracdyn/config.hpp"
#include "fracdyn/solver.hpp"

namespace fracdyn::cli {

int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

/// Problem assembly from the configured catalog (fhn, relaxation, linear,
/// linear_delay), including the default resting history for fhn runs.
ProblemSpec build_problem(const config::RunConfig& rc);

}  // namespace fracdyn::cli
