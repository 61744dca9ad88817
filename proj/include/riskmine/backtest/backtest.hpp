#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "riskmine/expr/evaluate.hpp"
#include "riskmine/expr/factor_expr.hpp"
#include "riskmine/expr/option_catalog.hpp"
#include "riskmine/market/panel.hpp"

namespace riskmine::backtest {

enum class Selection { kLowestFactor, kHighestFactor };

struct PortfolioConfig {
  std::size_t top_n = 30;
  Selection selection = Selection::kLowestFactor;
  double cost_bps = 0.0;  // one-way, charged on sum |w_new - w_old|
  expr::Aggregation aggregation = expr::Aggregation::kMean;

  void validate() const;
};

// w_i = (1 / E_i) / sum_j (1 / E_j). Throws DomainError on a nonpositive value.
std::vector<double> portfolio_weights(std::span<const double> factor_values);

// Shifts values by (-min + delta) when any is <= 0, delta = 1e-6 * (max - min),
// or 1 when all values are equal. Order is preserved.
std::vector<double> shift_positive(std::span<const double> values);

struct Rebalance {
  std::size_t day = 0;                // decision day; held over day + 1
  std::vector<std::size_t> symbols;   // selected symbol indices
  std::vector<double> weights;
};

struct BacktestSummary {
  double total_return = 0.0;
  double max_drawdown = 0.0;       // largest peak-to-trough fall as a fraction of the peak
  double daily_volatility = 0.0;   // sample standard deviation of daily returns after day 0
};

struct BacktestResult {
  std::vector<market::Date> dates;
  std::vector<double> net_value;      // net_value[0] = 1
  std::vector<double> daily_returns;  // gross portfolio return realised on each day; 0 on day 0
  std::vector<double> turnover;       // rebalance turnover paid on each day; 0 on day 0
  std::vector<Rebalance> rebalances;
  std::vector<std::string> diagnostics;
  BacktestSummary summary;
};

// Daily rebalanced long-only portfolio: at each day's last close pick top_n
// symbols by that day's factor value, weight them inversely to it, hold over
// the next day. Symbols need a valid factor value and a valid close on the
// decision day; a selected symbol without a close the next day returns 0.
BacktestResult run_backtest(const expr::FactorExpr& e, const expr::OptionCatalog& catalog,
                            const market::Panel& panel, const PortfolioConfig& config);

// Same, from precomputed daily factor values aligned with the panel.
BacktestResult run_backtest(const market::DailyGrid& factor, const market::Panel& panel,
                            const PortfolioConfig& config);

// date,net_value,daily_return,turnover
void write_result_csv(const BacktestResult& result, std::ostream& out);
// key: value lines for total_return, max_drawdown, daily_volatility.
void write_summary(const BacktestResult& result, std::ostream& out);

}  // namespace riskmine::backtest
