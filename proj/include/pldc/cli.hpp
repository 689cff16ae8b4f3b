#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pldc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;      // usage, malformed data, shape mismatch, I/O
inline constexpr int kExitNumerical = 3;  // divergence or oracle failure

/// Entry point behind the `pldc` binary. `args` excludes the program name.
/// Reports go to `out`, diagnostics and warnings to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pldc
