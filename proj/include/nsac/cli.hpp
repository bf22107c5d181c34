#pragma once

#include <ostream>

namespace nsac {

/// Entry point of the `nsac` tool. Subcommands: simulate, sweep, rate-fit,
/// galerkin-study, kato-check, mms-verify. Failures print one line
///   error: kind=<kind> message="<text>"
/// to `err` and return 1 (2 for usage errors).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nsac
