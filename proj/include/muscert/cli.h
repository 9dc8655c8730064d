#ifndef MUSCERT_CLI_H_
#define MUSCERT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace muscert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitVerification = 3;

// Runs one command. `args` excludes the program name. Records go to `out`
// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace muscert::cli

#endif  // MUSCERT_CLI_H_
