#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "riskmine/backtest/backtest.hpp"
#include "riskmine/hppo/config.hpp"
#include "riskmine/hppo/trainer.hpp"
#include "riskmine/market/split.hpp"
#include "riskmine/market/synthetic.hpp"

namespace riskmine::cli {

enum class DataSource { kSynthetic, kCsv };

struct SyntheticConfig {
  market::SyntheticSpec spec;
  std::string planted = "((0.5·close)+(0.1·volume))";
  std::optional<std::size_t> planted_option;  // resolves ambiguous weights
  // Option the planted tree uses in the recent dataset of a transfer run.
  std::optional<std::size_t> recent_option;
};

struct DataConfig {
  DataSource source = DataSource::kSynthetic;
  std::filesystem::path panel;
  std::filesystem::path target;  // empty: realized volatility from the panel
  std::size_t market_minutes = market::kUsMarketMinutes;
  std::optional<market::DateRange> pretrain;
  std::optional<market::DateRange> train;
  std::optional<market::DateRange> eval;
};

struct RunConfig {
  std::uint64_t seed = 0;
  DataConfig data;
  std::optional<SyntheticConfig> synthetic;
  hppo::MiningConfig mining;
  backtest::PortfolioConfig portfolio;
};

// INI text: global `seed`, sections [data], [data.synthetic], [policy],
// [train], [transfer], [pool], [backtest]. Unknown sections or keys, and
// malformed values, raise ConfigError naming the section and key.
// `overrides` are "section.key=value" strings ("seed=value" for the global)
// applied before validation. Relative paths resolve against `base_dir`.
RunConfig parse_run_config(std::istream& in, const std::vector<std::string>& overrides = {},
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

// Planted factor of the synthetic section, parsed against the run's catalog.
expr::FactorExpr planted_factor(const RunConfig& config);

// Data for the run: the train window (recent) and, for transfer runs, the
// pretrain window (historical). Synthetic transfer runs draw the historical
// set separately (seed + 1, planted option) and the recent one with
// recent_option; date windows then apply to the recent set only.
struct LoadedData {
  hppo::PhaseData historical;
  hppo::PhaseData recent;
};
LoadedData load_training_data(const RunConfig& config);

// Panel and target of the evaluation window.
hppo::PhaseData load_eval_data(const RunConfig& config);

}  // namespace riskmine::cli
