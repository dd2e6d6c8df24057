#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kelcap::cli {

// Entry point behind the kelcap binary. args excludes the program name.
// Returns 0 on success, 1 on validation/usage errors, 2 on runtime errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kelcap::cli
