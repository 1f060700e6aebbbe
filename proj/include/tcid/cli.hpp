#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tcid::cli {

// 4 is a numeric failure (quadrature tolerance not met).
enum ExitCode : int { kOk = 0, kUsage = 1, kFormat = 2, kNegative = 3, kNumeric = 4 };

/// Runs one verb. JSON goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Worker cap from TCID_THREADS, defaulting to the hardware concurrency.
unsigned thread_cap();

}  // namespace tcid::cli
