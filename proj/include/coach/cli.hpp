#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace coach {

// `args` excludes the program name. Returns 0 on success, 1 on a domain
// failure, 2 on a usage error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coach
