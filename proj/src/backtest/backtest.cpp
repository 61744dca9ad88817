#include "riskmine/backtest/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "riskmine/error.hpp"
#include "riskmine/market/csv.hpp"

namespace riskmine::backtest {

void PortfolioConfig::validate() const {
  if (top_n < 1) throw ConfigError("backtest.top_n must be at least 1");
  if (!(cost_bps >= 0.0)) throw ConfigError("backtest.cost_bps must be nonnegative");
}

std::vector<double> portfolio_weights(std::span<const double> factor_values) {
  if (factor_values.empty()) throw BacktestError("no symbols to weight");
  std::vector<double> w(factor_values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = factor_values[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("portfolio weight needs a positive factor value, got " +
                        market::format_number(v));
    }
    w[i] = 1.0 / v;
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return w;
}

std::vector<double> shift_positive(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
  if (*lo > 0.0) return out;
  const double min = *lo;
  const double range = *hi - *lo;
  const double delta = range > 0.0 ? 1e-6 * range : 1.0;
  for (double& x : out) x = x - min + delta;
  return out;
}

namespace {

// Close at the last valid minute of the day, or NaN.
double last_close(const market::Panel& panel, std::size_t d, std::size_t s) {
  auto valid = panel.validity(d, s);
  auto close = panel.series(d, s, market::Feature::kClose);
  for (std::size_t m = valid.size(); m-- > 0;) {
    if (valid[m]) return close[m];
  }
  return std::nan("");
}

BacktestSummary summarize(const BacktestResult& r) {
  BacktestSummary s;
  s.total_return = r.net_value.back() - 1.0;
  double peak = r.net_value.front();
  for (double v : r.net_value) {
    peak = std::max(peak, v);
    s.max_drawdown = std::max(s.max_drawdown, (peak - v) / peak);
  }
  const std::size_t n = r.daily_returns.size() > 0 ? r.daily_returns.size() - 1 : 0;
  if (n >= 2) {
    double mean = 0.0;
    for (std::size_t t = 1; t <= n; ++t) mean += r.daily_returns[t];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t t = 1; t <= n; ++t) var += std::pow(r.daily_returns[t] - mean, 2);
    s.daily_volatility = std::sqrt(var / static_cast<double>(n - 1));
  }
  return s;
}

}  // namespace

BacktestResult run_backtest(const market::DailyGrid& factor, const market::Panel& panel,
                            const PortfolioConfig& config) {
  config.validate();
  const std::size_t days = panel.num_days();
  const std::size_t symbols = panel.num_symbols();
  if (days < 2) throw InsufficientDataError("backtest needs at least 2 days");
  if (factor.days != days || factor.symbols != symbols) {
    throw ShapeError("factor grid does not match the panel");
  }

  BacktestResult r;
  r.dates = panel.days();
  r.net_value.assign(days, 1.0);
  r.daily_returns.assign(days, 0.0);
  r.turnover.assign(days, 0.0);

  std::vector<double> close_today(symbols), close_next(symbols);
  for (std::size_t s = 0; s < symbols; ++s) close_today[s] = last_close(panel, 0, s);
  std::vector<double> held(symbols, 0.0);

  for (std::size_t d = 0; d + 1 < days; ++d) {
    std::vector<std::size_t> candidates;
    for (std::size_t s = 0; s < symbols; ++s) {
      if (factor.is_valid(d, s) && std::isfinite(close_today[s])) candidates.push_back(s);
    }
    if (candidates.empty()) {
      throw BacktestError("no valid symbols on " + market::format_date(panel.days()[d]));
    }
    if (candidates.size() < config.top_n) {
      r.diagnostics.push_back(market::format_date(panel.days()[d]) + ": " +
                              std::to_string(candidates.size()) + " valid symbols, fewer than " +
                              std::to_string(config.top_n));
    }
    const bool lowest = config.selection == Selection::kLowestFactor;
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
      return lowest ? factor.at(d, a) < factor.at(d, b) : factor.at(d, a) > factor.at(d, b);
    });
    candidates.resize(std::min(candidates.size(), config.top_n));

    std::vector<double> values(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) values[i] = factor.at(d, candidates[i]);
    Rebalance reb;
    reb.day = d;
    reb.symbols = candidates;
    reb.weights = portfolio_weights(shift_positive(values));

    std::vector<double> target(symbols, 0.0);
    for (std::size_t i = 0; i < candidates.size(); ++i) target[candidates[i]] = reb.weights[i];
    double turnover = 0.0;
    for (std::size_t s = 0; s < symbols; ++s) turnover += std::fabs(target[s] - held[s]);
    held = std::move(target);

    double gross = 0.0;
    for (std::size_t s = 0; s < symbols; ++s) close_next[s] = last_close(panel, d + 1, s);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const std::size_t s = candidates[i];
      if (!std::isfinite(close_next[s])) {
        r.diagnostics.push_back(market::format_date(panel.days()[d + 1]) + ": no close for " +
                                panel.symbols()[s] + ", held flat");
        continue;
      }
      gross += reb.weights[i] * (close_next[s] / close_today[s] - 1.0);
    }
    const double cost = config.cost_bps * 1e-4 * turnover;
    r.daily_returns[d + 1] = gross;
    r.turnover[d + 1] = turnover;
    r.net_value[d + 1] = r.net_value[d] * (1.0 + gross - cost);
    r.rebalances.push_back(std::move(reb));
    std::swap(close_today, close_next);
  }
  r.summary = summarize(r);
  return r;
}

BacktestResult run_backtest(const expr::FactorExpr& e, const expr::OptionCatalog& catalog,
                            const market::Panel& panel, const PortfolioConfig& config) {
  config.validate();
  return run_backtest(expr::evaluate(e, catalog, panel, config.aggregation), panel, config);
}

void write_result_csv(const BacktestResult& r, std::ostream& out) {
  using market::format_number;
  out << "date,net_value,daily_return,turnover\n";
  for (std::size_t t = 0; t < r.net_value.size(); ++t) {
    out << market::format_date(r.dates[t]) << ',' << format_number(r.net_value[t]) << ','
        << format_number(r.daily_returns[t]) << ',' << format_number(r.turnover[t]) << '\n';
  }
}

void write_summary(const BacktestResult& r, std::ostream& out) {
  using market::format_number;
  out << "total_return: " << format_number(r.summary.total_return) << '\n'
      << "max_drawdown: " << format_number(r.summary.max_drawdown) << '\n'
      << "daily_volatility: " << format_number(r.summary.daily_volatility) << '\n';
}

}  // namespace riskmine::backtest
