#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace famex {

// Runs one command. args excludes the program name.
// Exit codes: 0 success, 1 data or computation error, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace famex
