#pragma once

#include <iosfwd>

namespace aoi {

/// Entry point of the aoi-sched command line. Returns the process exit status;
/// failures print "error: code=NAME message=..." to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aoi
