#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bfp::cli {

// Exit codes reported by run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;

// Runs one CLI invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace bfp::cli
