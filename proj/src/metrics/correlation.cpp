#include "riskmine/metrics/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskmine/error.hpp"

namespace riskmine::metrics {
namespace {

enum class Status { kOk, kTooFewPoints, kDegenerate };

Status gather(std::span<const double> x, std::span<const double> y,
              std::span<const std::uint8_t> valid, std::vector<double>& xs,
              std::vector<double>& ys) {
  if (x.size() != y.size() || (!valid.empty() && valid.size() != x.size())) {
    throw ShapeError("correlation inputs differ in length");
  }
  xs.clear();
  ys.clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!valid.empty() && !valid[i]) continue;
    xs.push_back(x[i]);
    ys.push_back(y[i]);
  }
  return xs.size() < 2 ? Status::kTooFewPoints : Status::kOk;
}

Status pearson_dense(const std::vector<double>& x, const std::vector<double>& y, double& r) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return Status::kDegenerate;
  r = sxy / std::sqrt(sxx * syy);
  if (!std::isfinite(r)) return Status::kDegenerate;
  r = std::clamp(r, -1.0, 1.0);
  return Status::kOk;
}

Status correlate(std::span<const double> x, std::span<const double> y,
                 std::span<const std::uint8_t> valid, bool ranked, double& r) {
  thread_local std::vector<double> xs;
  thread_local std::vector<double> ys;
  const Status st = gather(x, y, valid, xs, ys);
  if (st != Status::kOk) return st;
  if (!ranked) return pearson_dense(xs, ys, r);
  return pearson_dense(average_ranks(xs), average_ranks(ys), r);
}

double or_throw(Status st, double r, std::size_t points) {
  if (st == Status::kTooFewPoints) {
    throw InsufficientDataError("correlation needs at least 2 jointly valid points, got " +
                                std::to_string(points));
  }
  if (st == Status::kDegenerate) {
    throw DegenerateCorrelationError("correlation undefined for a constant input");
  }
  return r;
}

std::size_t count_valid(std::size_t n, std::span<const std::uint8_t> valid) {
  if (valid.empty()) return n;
  std::size_t c = 0;
  for (auto v : valid) c += v ? 1 : 0;
  return c;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y,
               std::span<const std::uint8_t> valid) {
  double r = 0.0;
  const Status st = correlate(x, y, valid, false, r);
  return or_throw(st, r, count_valid(x.size(), valid));
}

std::optional<double> try_pearson(std::span<const double> x, std::span<const double> y,
                                  std::span<const std::uint8_t> valid) {
  double r = 0.0;
  if (correlate(x, y, valid, false, r) != Status::kOk) return std::nullopt;
  return r;
}

std::optional<double> try_spearman(std::span<const double> x, std::span<const double> y,
                                   std::span<const std::uint8_t> valid) {
  double r = 0.0;
  if (correlate(x, y, valid, true, r) != Status::kOk) return std::nullopt;
  return r;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y,
                std::span<const std::uint8_t> valid) {
  double r = 0.0;
  const Status st = correlate(x, y, valid, true, r);
  return or_throw(st, r, count_valid(x.size(), valid));
}

}  // namespace riskmine::metrics
