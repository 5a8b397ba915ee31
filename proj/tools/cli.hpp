#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bivmap::cli {

// Exit codes: 0 success, 1 input or validation error, 2 internal error.
// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bivmap::cli
