#pragma once

#include <string>
#include <vector>

namespace stbiholo {

/// Entry point shared by the command-line binary and the tests.
/// `args` excludes the program name. Returns the process exit code:
/// 0 success, 1 validation/usage error, 2 I/O error.
int run_cli(const std::vector<std::string>& args);

} // namespace stbiholo
