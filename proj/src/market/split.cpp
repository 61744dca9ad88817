#include "riskmine/market/split.hpp"

#include <chrono>

#include "riskmine/error.hpp"

namespace riskmine::market {

void SplitSpec::validate() const {
  auto check_order = [](const DateRange& r, const char* name) {
    if (std::chrono::sys_days{r.last} < std::chrono::sys_days{r.first}) {
      throw ConfigError(std::string(name) + " range ends before it starts");
    }
  };
  check_order(pretrain, "pretrain");
  check_order(train, "train");
  if (!(std::chrono::sys_days{pretrain.last} < std::chrono::sys_days{train.first})) {
    throw ConfigError("pretrain range must end before the train range starts");
  }
  if (eval) {
    check_order(*eval, "eval");
    if (std::chrono::sys_days{eval->first} < std::chrono::sys_days{train.first}) {
      throw ConfigError("eval range must equal or follow the train range");
    }
  }
}

DayBounds select_days(const Panel& panel, const DateRange& range) {
  const auto first = std::chrono::sys_days{range.first};
  const auto last = std::chrono::sys_days{range.last};
  std::optional<std::size_t> lo;
  std::size_t hi = 0;
  for (std::size_t d = 0; d < panel.num_days(); ++d) {
    const auto day = std::chrono::sys_days{panel.days()[d]};
    if (day < first || day > last) continue;
    if (!lo) lo = d;
    hi = d;
  }
  if (!lo) {
    throw InsufficientDataError("no panel days inside " + format_date(range.first) + " .. " +
                                format_date(range.last));
  }
  return {*lo, hi};
}

}  // namespace riskmine::market
