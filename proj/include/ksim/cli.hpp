#pragma once

namespace ksim {

/// Full command-line driver (the `ksim` binary is a thin wrapper around
/// this). Returns the process exit code: 0 ok, 1 failed check, 2 bad
/// config or usage, 3 numerical/structural failure.
int run_cli(int argc, char** argv);

} // namespace ksim
