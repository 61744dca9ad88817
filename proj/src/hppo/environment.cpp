#include "riskmine/hppo/environment.hpp"

#include <cmath>

#include "riskmine/error.hpp"

namespace riskmine::hppo {

StateEncoder::StateEncoder(const market::Panel& panel) {
  const std::size_t days = panel.num_days();
  std::vector<State> means(days);
  std::vector<bool> present(days, false);
  for (std::size_t d = 0; d < days; ++d) {
    State sum{};
    std::size_t n = 0;
    for (std::size_t s = 0; s < panel.num_symbols(); ++s) {
      auto valid = panel.validity(d, s);
      for (std::size_t m = 0; m < panel.minutes_per_day(); ++m) {
        if (!valid[m]) continue;
        for (std::size_t f = 0; f < market::kFeatureCount; ++f) {
          sum[f] += panel.value(d, s, m, static_cast<market::Feature>(f));
        }
        ++n;
      }
    }
    if (n == 0) continue;
    for (double& x : sum) x /= static_cast<double>(n);
    means[d] = sum;
    present[d] = true;
  }

  State mu{}, sd{};
  std::size_t n = 0;
  for (std::size_t d = 0; d < days; ++d) {
    if (!present[d]) continue;
    for (std::size_t f = 0; f < mu.size(); ++f) mu[f] += means[d][f];
    ++n;
  }
  if (n > 0) {
    for (double& x : mu) x /= static_cast<double>(n);
    for (std::size_t d = 0; d < days; ++d) {
      if (!present[d]) continue;
      for (std::size_t f = 0; f < sd.size(); ++f) sd[f] += std::pow(means[d][f] - mu[f], 2);
    }
    for (double& x : sd) x = std::sqrt(x / static_cast<double>(n));
  }

  states_.assign(days, State{});
  for (std::size_t d = 0; d < days; ++d) {
    if (!present[d]) continue;  // days without data encode as the mean
    for (std::size_t f = 0; f < mu.size(); ++f) {
      states_[d][f] = sd[f] > 1e-12 ? (means[d][f] - mu[f]) / sd[f] : 0.0;
    }
  }
}

FactorEnvironment::FactorEnvironment(market::Panel panel, market::RvTarget target,
                                     expr::OptionCatalog catalog, expr::Aggregation aggregation,
                                     metrics::RewardConfig reward)
    : panel_(std::move(panel)), target_(std::move(target)), catalog_(std::move(catalog)),
      aggregation_(aggregation), reward_(reward), states_(panel_) {
  if (target_.days != panel_.num_days() || target_.symbols != panel_.num_symbols()) {
    throw ShapeError("target grid does not match the panel");
  }
  if (panel_.num_days() == 0) throw InsufficientDataError("training window has no days");
}

Evaluation FactorEnvironment::evaluate_one(const expr::FactorExpr& e) const {
  auto values = expr::evaluate_sequential(e, catalog_, panel_, aggregation_);
  auto result = metrics::score_factor(values, target_, reward_);
  Evaluation out;
  out.reward = result.reward;
  if (result.series) out.ic_star = result.series->ic_star;
  return out;
}

std::vector<Evaluation> FactorEnvironment::evaluate_batch(
    std::span<const expr::FactorExpr> batch) {
  std::vector<std::string> keys(batch.size());
  std::vector<std::size_t> todo;
  std::unordered_map<std::string, std::size_t> pending;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    keys[i] = expr::cache_key(batch[i]);
    if (cache_.count(keys[i])) {
      ++hits_;
    } else if (pending.emplace(keys[i], todo.size()).second) {
      todo.push_back(i);
    } else {
      ++hits_;
    }
  }

  std::vector<Evaluation> fresh(todo.size());
  const auto n = static_cast<std::ptrdiff_t>(todo.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    fresh[static_cast<std::size_t>(j)] = evaluate_one(batch[todo[static_cast<std::size_t>(j)]]);
  }
  for (std::size_t j = 0; j < todo.size(); ++j) cache_.emplace(keys[todo[j]], fresh[j]);

  std::vector<Evaluation> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) out[i] = cache_.at(keys[i]);
  return out;
}

FactorEnvironment::Scored FactorEnvironment::score(const expr::FactorExpr& e) const {
  Scored s;
  s.values = expr::evaluate(e, catalog_, panel_, aggregation_);
  s.result = metrics::score_factor(s.values, target_, reward_);
  return s;
}

}  // namespace riskmine::hppo
