#pragma once

namespace gtvseg::cli {

/// Parses the command line and runs one subcommand. Returns the exit code;
/// diagnostics go to stderr.
int run(int argc, char** argv);

}  // namespace gtvseg::cli
