#pragma once

namespace duoboost {

/// Entry point behind the duoboost binary: gen-data, train, eval, compare.
/// Returns the process exit code; errors go to stderr and produce no
/// partial output files.
int cli_run(int argc, const char* const* argv);

} // namespace duoboost
