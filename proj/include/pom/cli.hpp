// Command-line entry point: crumbling, strategy evaluation, machine runs
// with traces/metrics/invariant checking, the property suite, and the
// scaling benchmark. Streams are injected so tests can drive it in-process.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pom {

// args = argv without the program name. Returns the process exit status:
//   0 success; 1 property or invariant failure; 2 usage or parse error.
// Traces and results go to `out`, diagnostics to `err`; the input file "-"
// reads from `in`.
int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace pom
