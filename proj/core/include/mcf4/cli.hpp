#ifndef MCF4_CLI_HPP
#define MCF4_CLI_HPP

#include <string>
#include <vector>

namespace mcf4 {
namespace cli {

/// Dispatch one of the subcommands {simulate, diagnose, rescale, cone,
/// density}. Returns 0 on success; module errors map to their distinct exit
/// codes, usage problems return 64.
int run_command(const std::vector<std::string>& args);

} // namespace cli
} // namespace mcf4

#endif
