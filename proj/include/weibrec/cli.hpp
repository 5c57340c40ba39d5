#pragma once

#include "weibrec/sim.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace weibrec {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

/// Default worker count is read from this variable when --threads is absent.
inline constexpr const char* kThreadsEnvVar = "WEIBREC_THREADS";

/// Exit codes: 0 success, 1 usage error, 2 bad input data, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `weibrec` tool. Reports go to `out` (or --out),
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Table-style text rendering of grid results: a coverage block and an
/// expected-length block, rows (n1, n2) by columns beta1.
std::string render_table(const std::vector<CellResult>& cells);

}  // namespace weibrec
