#pragma once

#include "riskmine/market/panel.hpp"
#include "riskmine/metrics/ic.hpp"

namespace riskmine::metrics {

struct RewardConfig {
  // Factors with a larger fraction of invalid cells earn nothing.
  double max_masked_fraction = 0.5;
  // Share of |RankIC*| mixed into the reward; the rest is |IC*|.
  double rank_ic_weight = 0.0;
};

struct RewardResult {
  double reward = 0.0;
  std::optional<IcSeries> series;  // empty when the metrics were undefined
};

// |IC*| (optionally mixed with |RankIC*|). Degenerate factors score 0; this
// never throws on data problems.
RewardResult score_factor(const market::DailyGrid& values, const market::DailyGrid& target,
                          const RewardConfig& config = {});

inline double reward(const market::DailyGrid& values, const market::DailyGrid& target,
                     const RewardConfig& config = {}) {
  return score_factor(values, target, config).reward;
}

}  // namespace riskmine::metrics
