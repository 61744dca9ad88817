#pragma once

#include <optional>

#include "riskmine/market/panel.hpp"

namespace riskmine::market {

struct DateRange {
  Date first;
  Date last;  // inclusive
};

// Pretrain and train windows are disjoint with pretrain strictly first; the
// evaluation window defaults to the train window.
struct SplitSpec {
  DateRange pretrain;
  DateRange train;
  std::optional<DateRange> eval;

  void validate() const;
  DateRange eval_range() const { return eval.value_or(train); }
};

// Inclusive day-index bounds of the panel days falling inside `range`.
struct DayBounds {
  std::size_t first = 0;
  std::size_t last = 0;
};
DayBounds select_days(const Panel& panel, const DateRange& range);

}  // namespace riskmine::market
