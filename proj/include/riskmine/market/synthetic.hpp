#pragma once

#include <cstddef>
#include <cstdint>

#include "riskmine/expr/factor_expr.hpp"
#include "riskmine/expr/option_catalog.hpp"
#include "riskmine/market/panel.hpp"

namespace riskmine::market {

struct SyntheticSpec {
  std::size_t symbols = 50;
  std::size_t days = 60;
  std::size_t minutes = 30;
  std::uint64_t seed = 0;
  double noise_sd = 0.0;
  Date start = Date{std::chrono::year{2023}, std::chrono::January, std::chrono::day{3}};
};

struct SyntheticData {
  Panel panel;
  RvTarget target;
};

// Random-walk minute bars with a next-day target planted from `planted`:
// per day, target = unit * (z - min z + 1 + noise_sd * eps), clipped at 0,
// where z is the cross-sectionally standardised daily value of the planted
// factor. At noise_sd = 0 the target is affine in the factor on every day.
SyntheticData generate_synthetic(const SyntheticSpec& spec, const expr::FactorExpr& planted,
                                 const expr::OptionCatalog& catalog);

// Business days (Mon-Fri) starting at `start` (rolled forward off weekends).
std::vector<Date> business_days(Date start, std::size_t count);

}  // namespace riskmine::market
