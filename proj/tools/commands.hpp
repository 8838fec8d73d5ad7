#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tvcs::cli {

/// Parses argv and runs one subcommand. Returns the process exit code:
/// 0 success, 1 runtime failure (one-line diagnostic on err), 2 flag error
/// (usage on err).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tvcs::cli
