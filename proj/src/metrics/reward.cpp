#include "riskmine/metrics/reward.hpp"

#include <cmath>

#include "riskmine/error.hpp"

namespace riskmine::metrics {

RewardResult score_factor(const market::DailyGrid& values, const market::DailyGrid& target,
                          const RewardConfig& config) {
  RewardResult out;
  const std::size_t cells = values.days * values.symbols;
  if (cells == 0) return out;
  const double masked =
      1.0 - static_cast<double>(values.valid_count()) / static_cast<double>(cells);
  if (masked > config.max_masked_fraction) return out;
  try {
    out.series = ic_series(values, target);
  } catch (const InsufficientDataError&) {
    return out;
  }
  const double w = config.rank_ic_weight;
  out.reward = (1.0 - w) * std::fabs(out.series->ic_star) + w * std::fabs(out.series->rank_ic_star);
  return out;
}

}  // namespace riskmine::metrics
