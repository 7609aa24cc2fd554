#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace im2colsim::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kBadInput = 3,  // parse, config or shape errors
  kCapacity = 4,
  kMismatch = 5,
};

struct Options {
  std::string workload;
  std::string arch;     // empty: built-in defaults
  std::string grid;     // sweep grid file
  std::vector<std::string> methods;
  std::string out;      // empty or "-": stdout
  bool verify = false;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  // reuse
  std::int64_t block_m = 0;  // 0: one output row
  int block_n = 0;           // 0: all output channels
  int block_k = 0;           // 0: C_I
  double budget_sets = 2.0;  // SRAM budget in subtile working sets
};

/// Each command writes CSV to `out` and diagnostics to `err`; errors are
/// reported as one "error: E_CODE: message" line with the matching exit code.
int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_overhead(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_reuse(const Options& opt, std::ostream& out, std::ostream& err);

}  // namespace im2colsim::cli
