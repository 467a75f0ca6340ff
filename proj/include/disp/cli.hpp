#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace disp {

// Full command-line driver, callable in-process. args excludes the program
// name. Returns the process exit code: 0 ok, 1 validation/usage error,
// 2 verification failure.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace disp
