#pragma once

#include <string>
#include <vector>

namespace pgpca::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `pgpca` tool. Returns the process exit code.
int run(int argc, const char* const* argv);
/// Same, with args excluding the program name.
int run(const std::vector<std::string>& args);

/// Expands `--config file.json` into flags. Keys are long flag names without
/// dashes; flags already present in `args` win over the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace pgpca::cli
