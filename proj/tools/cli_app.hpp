#pragma once

namespace cgp::tools {

/// Entry point of the `cgp` command line tool.
/// Exit codes: 0 success, 2 validation error, 3 data error, 4 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace cgp::tools
