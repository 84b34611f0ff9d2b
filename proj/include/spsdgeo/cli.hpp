#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spsdgeo {

// Batch command-line entry point. Parses argv (without the program name),
// runs one subcommand, and prints a JSON run report to `out`. Returns 0 on
// success, 2 on validation errors, 3 on numerical failures.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace spsdgeo
