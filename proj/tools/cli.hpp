#pragma once

#include <string>
#include <vector>

namespace hybridbvp::cli {

enum ExitCode : int {
  kOk = 0,
  kNonConvergence = 1,
  kCheckFailed = 2,
  kConfigError = 3,
};

/// Runs one subcommand. argv[0] is the program name.
int run(int argc, char** argv);
/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args);

}  // namespace hybridbvp::cli
