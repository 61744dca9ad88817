#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "riskmine/expr/evaluate.hpp"
#include "riskmine/expr/factor_expr.hpp"
#include "riskmine/expr/option_catalog.hpp"
#include "riskmine/hppo/model.hpp"
#include "riskmine/market/panel.hpp"
#include "riskmine/metrics/ic.hpp"
#include "riskmine/metrics/reward.hpp"

namespace riskmine::hppo {

// Per-day high-level states for one training window. The z-score statistics
// come from that window alone.
class StateEncoder {
 public:
  StateEncoder() = default;
  explicit StateEncoder(const market::Panel& panel);

  std::size_t num_days() const { return states_.size(); }
  const State& state(std::size_t day) const { return states_.at(day); }

 private:
  std::vector<State> states_;
};

struct Evaluation {
  double reward = 0.0;
  std::optional<double> ic_star;  // signed; empty when the metrics were undefined
};

// One phase's data: panel, target, catalog and reward settings, with a
// reward cache keyed by expression.
class FactorEnvironment {
 public:
  FactorEnvironment(market::Panel panel, market::RvTarget target, expr::OptionCatalog catalog,
                    expr::Aggregation aggregation = expr::Aggregation::kMean,
                    metrics::RewardConfig reward = {});

  const market::Panel& panel() const { return panel_; }
  const market::RvTarget& target() const { return target_; }
  const expr::OptionCatalog& catalog() const { return catalog_; }
  const StateEncoder& states() const { return states_; }

  // Rewards for a batch. Uncached expressions are evaluated across OpenMP
  // threads; the result does not depend on the thread count.
  std::vector<Evaluation> evaluate_batch(std::span<const expr::FactorExpr> batch);

  struct Scored {
    expr::FactorValues values;
    metrics::RewardResult result;
  };
  // Uncached full evaluation, including the factor grid.
  Scored score(const expr::FactorExpr& e) const;

  std::size_t cache_size() const { return cache_.size(); }
  std::size_t cache_hits() const { return hits_; }

 private:
  Evaluation evaluate_one(const expr::FactorExpr& e) const;

  market::Panel panel_;
  market::RvTarget target_;
  expr::OptionCatalog catalog_;
  expr::Aggregation aggregation_;
  metrics::RewardConfig reward_;
  StateEncoder states_;
  std::unordered_map<std::string, Evaluation> cache_;
  std::size_t hits_ = 0;
};

}  // namespace riskmine::hppo
