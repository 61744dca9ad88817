#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace riskmine::market {

// Canonical feature order used everywhere in the code base.
enum class Feature : std::size_t { kOpen = 0, kHigh, kLow, kClose, kVolume, kVwap };

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "open", "high", "low", "close", "volume", "vwap"};

inline constexpr std::size_t index(Feature f) { return static_cast<std::size_t>(f); }
std::optional<Feature> feature_from_name(std::string_view name);

// Default interval counts; callers pass these as configuration.
inline constexpr std::size_t kUsMarketMinutes = 390;
inline constexpr std::size_t kChinaMarketMinutes = 240;

using Date = std::chrono::year_month_day;

Date parse_date(std::string_view text);  // ISO-8601 "YYYY-MM-DD"
std::string format_date(Date date);

using BarValues = std::array<double, kFeatureCount>;

// One minute bar of one symbol. Used at the ingestion boundary.
struct MinuteBar {
  std::string symbol;
  Date day;
  std::size_t minute_index = 0;
  BarValues values{};  // canonical feature order

  // high >= max(open, close), low <= min(open, close), prices > 0, volume >= 0.
  bool satisfies_invariants() const;
};

// Dense (day x symbol x minute x feature) store. Cells that are absent or
// invalid carry valid = false; their stored values are meaningless.
//
// Memory is laid out feature-major inside each (day, symbol) block so that
// series(d, s, f) is a contiguous run of minutes_per_day values.
class Panel {
 public:
  Panel() = default;
  Panel(std::vector<Date> days, std::vector<std::string> symbols, std::size_t minutes_per_day);

  std::size_t num_days() const { return days_.size(); }
  std::size_t num_symbols() const { return symbols_.size(); }
  std::size_t minutes_per_day() const { return minutes_; }
  const std::vector<Date>& days() const { return days_; }
  const std::vector<std::string>& symbols() const { return symbols_; }

  double value(std::size_t day, std::size_t symbol, std::size_t minute, Feature f) const {
    return values_[offset(day, symbol, f) + minute];
  }
  bool valid(std::size_t day, std::size_t symbol, std::size_t minute) const {
    return valid_[cell(day, symbol) * minutes_ + minute] != 0;
  }

  std::span<const double> series(std::size_t day, std::size_t symbol, Feature f) const {
    return {values_.data() + offset(day, symbol, f), minutes_};
  }
  std::span<const std::uint8_t> validity(std::size_t day, std::size_t symbol) const {
    return {valid_.data() + cell(day, symbol) * minutes_, minutes_};
  }

  void set_bar(std::size_t day, std::size_t symbol, std::size_t minute, const BarValues& bar);
  void mask(std::size_t day, std::size_t symbol, std::size_t minute);

  std::size_t masked_cells() const;

  // Sub-panel of the days in [first, last] (inclusive indices).
  Panel slice_days(std::size_t first, std::size_t last) const;
  // Sub-panel whose symbol axis is symbols()[order[0]], symbols()[order[1]], ...
  Panel reorder_symbols(std::span<const std::size_t> order) const;

  bool operator==(const Panel& other) const = default;

 private:
  std::size_t cell(std::size_t day, std::size_t symbol) const {
    return day * symbols_.size() + symbol;
  }
  std::size_t offset(std::size_t day, std::size_t symbol, Feature f) const {
    return (cell(day, symbol) * kFeatureCount + index(f)) * minutes_;
  }

  std::vector<Date> days_;
  std::vector<std::string> symbols_;
  std::size_t minutes_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

// (day x symbol) grid of doubles with a validity mask. Base of RvTarget and
// FactorValues.
struct DailyGrid {
  std::size_t days = 0;
  std::size_t symbols = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  DailyGrid() = default;
  DailyGrid(std::size_t num_days, std::size_t num_symbols)
      : days(num_days), symbols(num_symbols), values(num_days * num_symbols, 0.0),
        valid(num_days * num_symbols, 0) {}

  double at(std::size_t d, std::size_t s) const { return values[d * symbols + s]; }
  bool is_valid(std::size_t d, std::size_t s) const { return valid[d * symbols + s] != 0; }
  void set(std::size_t d, std::size_t s, double v) {
    values[d * symbols + s] = v;
    valid[d * symbols + s] = 1;
  }
  void invalidate(std::size_t d, std::size_t s) {
    values[d * symbols + s] = 0.0;
    valid[d * symbols + s] = 0;
  }
  std::span<const double> day_values(std::size_t d) const {
    return {values.data() + d * symbols, symbols};
  }
  std::span<const std::uint8_t> day_valid(std::size_t d) const {
    return {valid.data() + d * symbols, symbols};
  }
  std::size_t valid_count() const;
  DailyGrid slice_days(std::size_t first, std::size_t last) const;

  bool operator==(const DailyGrid& other) const = default;
};

// Next-day realized volatility; row d is computed from day d + 1 prices.
struct RvTarget : DailyGrid {
  using DailyGrid::DailyGrid;
  RvTarget() = default;
  explicit RvTarget(DailyGrid grid) : DailyGrid(std::move(grid)) {}
};

}  // namespace riskmine::market
