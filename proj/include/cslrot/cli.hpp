#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cslrot {

inline constexpr const char* kOutputDirEnv = "CSLROT_OUTPUT_DIR";

// Exit codes: 0 success, 1 usage or input error, 2 numerical convergence failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace cslrot
