#include "riskmine/market/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "riskmine/error.hpp"

namespace riskmine::market {

std::optional<Feature> feature_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto bad = [&] { return FormatError("invalid ISO-8601 date '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  const char* p = text.data();
  if (std::from_chars(p, p + 4, y).ec != std::errc{}) throw bad();
  if (std::from_chars(p + 5, p + 7, m).ec != std::errc{}) throw bad();
  if (std::from_chars(p + 8, p + 10, d).ec != std::errc{}) throw bad();
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw bad();
  return date;
}

std::string format_date(Date date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

bool MinuteBar::satisfies_invariants() const {
  const double open = values[index(Feature::kOpen)];
  const double high = values[index(Feature::kHigh)];
  const double low = values[index(Feature::kLow)];
  const double close = values[index(Feature::kClose)];
  const double volume = values[index(Feature::kVolume)];
  const double vwap = values[index(Feature::kVwap)];
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  if (open <= 0 || high <= 0 || low <= 0 || close <= 0 || vwap <= 0) return false;
  if (volume < 0) return false;
  return high >= std::max(open, close) && low <= std::min(open, close) && low <= high;
}

Panel::Panel(std::vector<Date> days, std::vector<std::string> symbols, std::size_t minutes_per_day)
    : days_(std::move(days)), symbols_(std::move(symbols)), minutes_(minutes_per_day) {
  if (minutes_ == 0) throw ShapeError("panel needs at least one minute per day");
  const std::size_t cells = days_.size() * symbols_.size();
  values_.assign(cells * kFeatureCount * minutes_, 0.0);
  valid_.assign(cells * minutes_, 0);
}

void Panel::set_bar(std::size_t day, std::size_t symbol, std::size_t minute, const BarValues& bar) {
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    values_[offset(day, symbol, static_cast<Feature>(f)) + minute] = bar[f];
  }
  valid_[cell(day, symbol) * minutes_ + minute] = 1;
}

void Panel::mask(std::size_t day, std::size_t symbol, std::size_t minute) {
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    values_[offset(day, symbol, static_cast<Feature>(f)) + minute] = 0.0;
  }
  valid_[cell(day, symbol) * minutes_ + minute] = 0;
}

std::size_t Panel::masked_cells() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{0}));
}

Panel Panel::slice_days(std::size_t first, std::size_t last) const {
  if (first > last || last >= days_.size()) throw ShapeError("slice_days: range out of bounds");
  Panel out({days_.begin() + first, days_.begin() + last + 1}, symbols_, minutes_);
  const std::size_t block = symbols_.size() * kFeatureCount * minutes_;
  std::copy(values_.begin() + first * block, values_.begin() + (last + 1) * block,
            out.values_.begin());
  const std::size_t vblock = symbols_.size() * minutes_;
  std::copy(valid_.begin() + first * vblock, valid_.begin() + (last + 1) * vblock,
            out.valid_.begin());
  return out;
}

Panel Panel::reorder_symbols(std::span<const std::size_t> order) const {
  std::vector<std::string> names;
  names.reserve(order.size());
  for (std::size_t s : order) {
    if (s >= symbols_.size()) throw ShapeError("reorder_symbols: index out of bounds");
    names.push_back(symbols_[s]);
  }
  Panel out(days_, std::move(names), minutes_);
  for (std::size_t d = 0; d < days_.size(); ++d) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const auto src = series(d, order[i], static_cast<Feature>(f));
        std::copy(src.begin(), src.end(),
                  out.values_.begin() + out.offset(d, i, static_cast<Feature>(f)));
      }
      const auto v = validity(d, order[i]);
      std::copy(v.begin(), v.end(), out.valid_.begin() + out.cell(d, i) * minutes_);
    }
  }
  return out;
}

std::size_t DailyGrid::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

DailyGrid DailyGrid::slice_days(std::size_t first, std::size_t last) const {
  if (first > last || last >= days) throw ShapeError("slice_days: range out of bounds");
  DailyGrid out(last - first + 1, symbols);
  std::copy(values.begin() + first * symbols, values.begin() + (last + 1) * symbols,
            out.values.begin());
  std::copy(valid.begin() + first * symbols, valid.begin() + (last + 1) * symbols,
            out.valid.begin());
  return out;
}

}  // namespace riskmine::market
