#pragma once

#include "riskmine/expr/factor_expr.hpp"
#include "riskmine/expr/option_catalog.hpp"
#include "riskmine/market/panel.hpp"

#include <utility>

namespace riskmine::expr {

// How minute-level values collapse into one value per (day, symbol).
enum class Aggregation { kMean, kLast };

// Daily factor values E(f). A cell is invalid iff a minute feeding it was
// masked in the panel or hit a protected-operator guard.
struct FactorValues : market::DailyGrid {
  using DailyGrid::DailyGrid;
  FactorValues() = default;
  explicit FactorValues(market::DailyGrid grid) : DailyGrid(std::move(grid)) {}
};

// Minute-vectorised evaluation, (day, symbol) cells partitioned across OpenMP
// threads. Output is identical for any thread count.
FactorValues evaluate(const FactorExpr& expr, const OptionCatalog& catalog,
                      const market::Panel& panel, Aggregation aggregation = Aggregation::kMean);

// Single-threaded evaluation, same partitioning as evaluate(). Used where the
// caller already runs in a parallel region.
FactorValues evaluate_sequential(const FactorExpr& expr, const OptionCatalog& catalog,
                                 const market::Panel& panel,
                                 Aggregation aggregation = Aggregation::kMean);

// Reference implementation: recursive scalar tree walk per minute. Slow;
// kept for cross-checking the kernels.
FactorValues evaluate_reference(const FactorExpr& expr, const OptionCatalog& catalog,
                                const market::Panel& panel,
                                Aggregation aggregation = Aggregation::kMean);

}  // namespace riskmine::expr
