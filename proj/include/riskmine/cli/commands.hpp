#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "riskmine/cli/run_config.hpp"
#include "riskmine/expr/factor_expr.hpp"

namespace riskmine::cli {

struct CommandOptions {
  std::filesystem::path out_dir = "out";
  bool force = false;  // overwrite existing outputs
};

// Writes <out>/panel.csv and <out>/target.csv; prints the planted formula and
// its IC* on the generated data.
void cmd_synth(const RunConfig& config, const CommandOptions& options, std::ostream& out);

// Writes <out>/checkpoint.bin, <out>/pool.tsv and <out>/iterations.csv.
void cmd_mine(const RunConfig& config, const CommandOptions& options, std::ostream& out);

// Writes <out>/eval.csv: one row per pool factor, sorted by ic_star descending.
void cmd_eval(const RunConfig& config, const std::filesystem::path& pool_file,
              const CommandOptions& options, std::ostream& out);

// Writes <out>/backtest_<rank>.csv per factor and <out>/backtest_summary.txt.
void cmd_backtest(const RunConfig& config, const std::filesystem::path& pool_file,
                  const CommandOptions& options, std::ostream& out);

// Pool file entries parsed back into expressions.
std::vector<expr::FactorExpr> load_pool(const RunConfig& config,
                                        const std::filesystem::path& pool_file);

// Full command line: subcommand dispatch, flag handling and exit codes
// (0 success, 1 usage or configuration, 2 data, 3 training).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace riskmine::cli
