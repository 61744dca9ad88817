#include "riskmine/metrics/ic.hpp"

#include <cmath>

#include "riskmine/error.hpp"
#include "riskmine/metrics/correlation.hpp"

namespace riskmine::metrics {
namespace {

struct DayResult {
  bool ok = false;
  double ic = 0.0;
  double rank_ic = 0.0;
};

DayResult one_day(const market::DailyGrid& values, const market::DailyGrid& target,
                  std::size_t d, std::vector<std::uint8_t>& joint) {
  const auto vv = values.day_valid(d);
  const auto tv = target.day_valid(d);
  for (std::size_t s = 0; s < joint.size(); ++s) joint[s] = vv[s] && tv[s];
  DayResult r;
  const auto ic = try_pearson(values.day_values(d), target.day_values(d), joint);
  if (!ic) return r;
  const auto rank_ic = try_spearman(values.day_values(d), target.day_values(d), joint);
  if (!rank_ic) return r;
  r.ok = true;
  r.ic = *ic;
  r.rank_ic = *rank_ic;
  return r;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double m) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

IcSeries assemble(const std::vector<DayResult>& results) {
  IcSeries out;
  for (std::size_t d = 0; d < results.size(); ++d) {
    if (!results[d].ok) {
      ++out.skipped_days;
      continue;
    }
    out.days.push_back(d);
    out.daily_ic.push_back(results[d].ic);
    out.daily_rank_ic.push_back(results[d].rank_ic);
  }
  if (out.days.empty()) {
    throw InsufficientDataError("no day has a computable cross-sectional correlation");
  }
  out.ic_star = mean(out.daily_ic);
  out.rank_ic_star = mean(out.daily_rank_ic);
  out.ic_std = sample_std(out.daily_ic, out.ic_star);
  out.rank_ic_std = sample_std(out.daily_rank_ic, out.rank_ic_star);
  if (out.days.size() >= 2 && out.ic_std > kIrStdFloor) out.ir_star = out.ic_star / out.ic_std;
  return out;
}

void check_shapes(const market::DailyGrid& values, const market::DailyGrid& target) {
  if (values.days != target.days || values.symbols != target.symbols) {
    throw ShapeError("factor values and target differ in shape");
  }
}

}  // namespace

IcSeries ic_series(const market::DailyGrid& values, const market::DailyGrid& target) {
  check_shapes(values, target);
  std::vector<DayResult> results(values.days);
  const long long days = static_cast<long long>(values.days);
#pragma omp parallel
  {
    std::vector<std::uint8_t> joint(values.symbols);
#pragma omp for schedule(static)
    for (long long d = 0; d < days; ++d) {
      results[static_cast<std::size_t>(d)] = one_day(values, target, static_cast<std::size_t>(d), joint);
    }
  }
  return assemble(results);
}

IcSeries ic_series_sequential(const market::DailyGrid& values, const market::DailyGrid& target) {
  check_shapes(values, target);
  std::vector<DayResult> results(values.days);
  std::vector<std::uint8_t> joint(values.symbols);
  for (std::size_t d = 0; d < values.days; ++d) results[d] = one_day(values, target, d, joint);
  return assemble(results);
}

}  // namespace riskmine::metrics
