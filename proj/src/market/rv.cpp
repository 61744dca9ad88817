#include "riskmine/market/rv.hpp"

#include <cmath>

#include "riskmine/error.hpp"

namespace riskmine::market {

RvTarget compute_rv(const Panel& panel) {
  if (panel.num_days() < 2) {
    throw InsufficientDataError("realized volatility needs at least 2 days, panel has " +
                                std::to_string(panel.num_days()));
  }
  RvTarget target(panel.num_days(), panel.num_symbols());
  const std::size_t minutes = panel.minutes_per_day();
  for (std::size_t d = 0; d + 1 < panel.num_days(); ++d) {
    for (std::size_t s = 0; s < panel.num_symbols(); ++s) {
      const auto valid = panel.validity(d + 1, s);
      const auto close = panel.series(d + 1, s, Feature::kClose);
      bool complete = true;
      for (std::size_t m = 0; m < minutes; ++m) {
        if (!valid[m]) {
          complete = false;
          continue;
        }
        if (!(close[m] > 0.0)) {
          throw DomainError("nonpositive close " + std::to_string(close[m]) + " at day " +
                            format_date(panel.days()[d + 1]) + ", symbol " +
                            panel.symbols()[s] + ", minute " + std::to_string(m));
        }
      }
      if (!complete) continue;
      double rv = 0.0;
      for (std::size_t j = 1; j < minutes; ++j) {
        const double r = std::log(close[j] / close[j - 1]);
        rv += r * r;
      }
      target.set(d, s, rv);
    }
  }
  return target;
}

}  // namespace riskmine::market
