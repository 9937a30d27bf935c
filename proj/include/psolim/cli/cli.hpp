#pragma once

namespace psolim::cli {

/// Entry point for the command-line tool. Subcommands: run, ode, rate,
/// lyapunov, bench, repro-paper. Returns the process exit code:
/// 0 success, 1 configuration error, 2 divergence, 3 numerical failure.
int run_command(int argc, const char* const* argv);

}  // namespace psolim::cli
