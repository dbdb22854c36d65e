#pragma once

#include <string>

#include "config.hpp"

namespace dann::cli {

// Each verb trains as configured, writes the full artifact set into the
// config's output directory and returns the process exit code:
// 0 success, 2 config error (thrown as ConfigError by resolve()),
// 3 numerical failure (a line search died before any accepted step).
int verb_run(const ResolvedRun& rr);
int verb_compare(const ResolvedRun& rr);
int verb_sweep(const ResolvedRun& rr);

}  // namespace dann::cli
