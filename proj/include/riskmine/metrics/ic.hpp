#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "riskmine/market/panel.hpp"

namespace riskmine::metrics {

// Threshold under which the daily-IC standard deviation counts as zero.
inline constexpr double kIrStdFloor = 1e-12;

// Daily cross-sectional IC / RankIC series and their aggregates.
struct IcSeries {
  std::vector<std::size_t> days;  // day indices with a computable correlation
  std::vector<double> daily_ic;
  std::vector<double> daily_rank_ic;
  std::size_t skipped_days = 0;

  double ic_star = 0.0;       // mean daily IC
  double rank_ic_star = 0.0;  // mean daily RankIC
  double ic_std = 0.0;        // sample standard deviation (n - 1); 0 for a single day
  double rank_ic_std = 0.0;
  // mean / std of the daily IC; empty when fewer than 2 days or std is zero.
  std::optional<double> ir_star;
};

// Per-day Pearson and Spearman correlation of factor values against the
// target over jointly valid symbols. Days with fewer than two such symbols or
// a constant side are skipped. Days are distributed across OpenMP threads.
IcSeries ic_series(const market::DailyGrid& values, const market::DailyGrid& target);

// Same computation on one thread, used as the reference for ic_series.
IcSeries ic_series_sequential(const market::DailyGrid& values, const market::DailyGrid& target);

}  // namespace riskmine::metrics
