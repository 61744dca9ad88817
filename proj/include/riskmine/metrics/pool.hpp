#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "riskmine/expr/evaluate.hpp"
#include "riskmine/expr/factor_expr.hpp"
#include "riskmine/expr/option_catalog.hpp"
#include "riskmine/metrics/ic.hpp"

namespace riskmine::metrics {

struct PoolEntry {
  expr::FactorExpr expr;
  IcSeries series;
  double score = 0.0;  // |IC*|
  expr::FactorValues values;
};

struct AdmitDecision {
  bool admitted = false;
  std::vector<expr::FactorExpr> evicted;
};

// Capacity-bounded set of mined factors, sorted by score descending, whose
// pairwise |correlation| over jointly valid cells stays within the cap.
class FactorPool {
 public:
  FactorPool(std::size_t capacity, double correlation_cap);

  // A candidate enters when it beats the pool minimum (or the pool has room)
  // and every entry it is too correlated with scores strictly lower; those
  // entries are displaced. At capacity the lowest-scored entry is evicted.
  AdmitDecision admit(const expr::FactorExpr& candidate, expr::FactorValues values,
                      IcSeries series);

  // Whether admit() could possibly accept a candidate with this score.
  bool could_admit(double score) const;
  bool contains(const expr::FactorExpr& e) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  double correlation_cap() const { return cap_; }
  bool empty() const { return entries_.empty(); }
  const std::vector<PoolEntry>& entries() const { return entries_; }
  double best_score() const { return entries_.empty() ? 0.0 : entries_.front().score; }

 private:
  std::size_t capacity_;
  double cap_;
  std::vector<PoolEntry> entries_;
};

// |correlation| of two factor grids over their jointly valid cells; 0 when undefined.
double factor_correlation(const market::DailyGrid& a, const market::DailyGrid& b);

// Pool file: one line per factor, tab-separated: formula, option index, score.
struct PoolRecord {
  std::string formula;
  std::size_t option = 0;
  double score = 0.0;
};

void write_pool_file(const FactorPool& pool, const expr::OptionCatalog& catalog,
                     const std::filesystem::path& path);
std::vector<PoolRecord> read_pool_file(const std::filesystem::path& path);

}  // namespace riskmine::metrics
