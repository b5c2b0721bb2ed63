#ifndef ADAPTKIT_CLI_HPP
#define ADAPTKIT_CLI_HPP

#include <iosfwd>

namespace adaptkit {

/// Runs the command-line tool. Exit codes: 0 success, 1 model diagnostics
/// with errors, 2 usage error, 3 solver or boundedness failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace adaptkit

#endif
