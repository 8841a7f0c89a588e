#pragma once

#include <string>
#include <vector>

namespace relaysim {

// Entry point behind the relaysim binary. Subcommands:
//   simulate <config> [--experiment NAME] [--out DIR] [--threads N] [--seed S]
//   pmf      <config> [--experiment NAME] [--threads N]
//   validate <config>
//   oracle   <config> [--threads N]
// Returns 0 on success, 1 on configuration errors, 2 on runtime errors.
int run_command(const std::vector<std::string>& args);

}  // namespace relaysim
