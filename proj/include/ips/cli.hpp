#ifndef IPS_CLI_HPP
#define IPS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ips {

// Runs one subcommand. Machine-readable JSON goes to `out`, human-oriented
// notes to `err`. Exit codes: 0 success/certified, 1 not ordered / not
// ergodic / order violations, 2 usage or validation errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ips

#endif
