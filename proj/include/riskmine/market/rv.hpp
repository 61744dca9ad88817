#pragma once

#include "riskmine/market/panel.hpp"

namespace riskmine::market {

// Next-day realized volatility from closing prices:
//   target[d, s] = sum_{j=1}^{M-1} (ln close[d+1, s, j] - ln close[d+1, s, j-1])^2
// The last day has no next day and is masked, as is any cell whose next day
// contains a masked minute.
RvTarget compute_rv(const Panel& panel);

}  // namespace riskmine::market
