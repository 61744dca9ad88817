#include "riskmine/market/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "riskmine/error.hpp"
#include "riskmine/expr/evaluate.hpp"
#include "riskmine/random.hpp"

namespace riskmine::market {
namespace {

constexpr double kTargetUnit = 1e-4;  // typical daily RV of minute returns

std::string symbol_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "S%03zu", i);
  return buf;
}

}  // namespace

std::vector<Date> business_days(Date start, std::size_t count) {
  using namespace std::chrono;
  std::vector<Date> out;
  sys_days day{start};
  while (out.size() < count) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) out.emplace_back(day);
    day += days{1};
  }
  return out;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec, const expr::FactorExpr& planted,
                                 const expr::OptionCatalog& catalog) {
  if (!(spec.noise_sd >= 0.0)) throw DomainError("noise_sd must be nonnegative");
  if (spec.symbols == 0 || spec.days == 0 || spec.minutes == 0) {
    throw ConfigError("synthetic panel dimensions must be positive");
  }
  expr::require_valid(planted, planted.tokens.size());

  Rng rng(spec.seed);
  std::vector<std::string> symbols;
  for (std::size_t s = 0; s < spec.symbols; ++s) symbols.push_back(symbol_name(s));
  Panel panel(business_days(spec.start, spec.days), symbols, spec.minutes);

  // Every symbol starts from the same price and volume level, so the cross
  // section reflects each symbol's own path rather than a fixed level gap.
  // Prices and volumes share a scale so weighted sums depend on the weights.
  constexpr double kLevel = 100.0;
  for (std::size_t s = 0; s < spec.symbols; ++s) {
    double price = kLevel;
    const double volume_level = kLevel;
    const double sigma = rng.uniform(0.0005, 0.003);
    for (std::size_t d = 0; d < spec.days; ++d) {
      const double day_sigma = sigma * std::exp(0.3 * rng.normal());
      const double day_volume = volume_level * std::exp(0.2 * rng.normal());
      if (d > 0) price *= std::exp(3.0 * day_sigma * rng.normal());  // overnight gap
      for (std::size_t m = 0; m < spec.minutes; ++m) {
        const double open = price;
        const double close = open * std::exp(day_sigma * rng.normal());
        const double high = std::max(open, close) * std::exp(0.5 * day_sigma * std::fabs(rng.normal()));
        const double low = std::min(open, close) * std::exp(-0.5 * day_sigma * std::fabs(rng.normal()));
        const double vwap = low + (high - low) * rng.uniform(0.25, 0.75);
        const double volume = day_volume * std::exp(0.3 * rng.normal());
        panel.set_bar(d, s, m, {open, high, low, close, volume, vwap});
        price = close;
      }
    }
  }

  const expr::FactorValues f = expr::evaluate(planted, catalog, panel, expr::Aggregation::kMean);
  RvTarget target(spec.days, spec.symbols);
  for (std::size_t d = 0; d + 1 < spec.days; ++d) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t s = 0; s < spec.symbols; ++s) {
      if (f.is_valid(d, s)) {
        sum += f.at(d, s);
        ++n;
      }
    }
    if (n < 2) continue;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t s = 0; s < spec.symbols; ++s) {
      if (f.is_valid(d, s)) ss += (f.at(d, s) - mean) * (f.at(d, s) - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 0.0)) continue;
    double zmin = 0.0;
    bool first = true;
    for (std::size_t s = 0; s < spec.symbols; ++s) {
      if (!f.is_valid(d, s)) continue;
      const double z = (f.at(d, s) - mean) / sd;
      zmin = first ? z : std::min(zmin, z);
      first = false;
    }
    for (std::size_t s = 0; s < spec.symbols; ++s) {
      const double eps = rng.normal();  // drawn for every cell to keep streams aligned
      if (!f.is_valid(d, s)) continue;
      const double z = (f.at(d, s) - mean) / sd;
      target.set(d, s, std::max(0.0, kTargetUnit * (z - zmin + 1.0 + spec.noise_sd * eps)));
    }
  }
  return {std::move(panel), std::move(target)};
}

}  // namespace riskmine::market
