#pragma once

namespace aim {

/// Entry point behind the `aim` binary. Subcommands: run, batch, report,
/// validate-map. Returns 0 on success, 1 on planner failure, 2 on bad input.
int cli_main(int argc, const char* const* argv);

}  // namespace aim
