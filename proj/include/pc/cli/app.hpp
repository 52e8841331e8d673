#pragma once

#include <ostream>

namespace pc::cli {

/// Entry point of the `pc` command. Data goes to `out`, diagnostics to
/// `err`. Returns the process exit status:
///   0   success
///   1   a scenario expectation failed
///   2   request rejected (validation, unknown entity, conflict)
///   3   model provider or fixture failure
///   4   storage or internal failure
///   64  usage error
///   65  scenario script could not be parsed
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pc::cli
