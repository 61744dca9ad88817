#include "riskmine/hppo/ppo.hpp"

#include <cmath>
#include <string>

#include "riskmine/error.hpp"
#include "riskmine/expr/grammar.hpp"

namespace riskmine::hppo {

bool TrainableGroups::allows(nn::ParamGroup group) const {
  switch (group) {
    case nn::ParamGroup::kHighPolicy: return high;
    case nn::ParamGroup::kLowPolicy: return low;
    case nn::ParamGroup::kEmbedding: return embedding;
    case nn::ParamGroup::kBaseline: return baseline;
  }
  return false;
}

StepTerms step_terms(nn::Graph& g, const HppoModel& model, const RolloutStep& step) {
  StepTerms t;
  nn::Var high = model.high_logits(g, step.state, step.prev_option);
  t.option_log_prob = g.log_prob(high, {}, step.option);
  t.option_entropy = g.entropy(high, {});

  const auto& tokens = step.expr.tokens;
  std::vector<nn::Var> log_probs, entropies;
  log_probs.reserve(tokens.size());
  entropies.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::span<const expr::Op> partial(tokens.data(), i);
    auto mask = expr::legal_mask(model.vocab(), partial, model.max_length());
    nn::Var logits = model.low_logits(g, step.state, step.option, partial);
    log_probs.push_back(g.log_prob(logits, mask, *model.vocab().index_of(tokens[i])));
    entropies.push_back(g.entropy(logits, mask));
  }
  t.token_log_prob = g.sum(log_probs);
  t.token_entropy = g.scale(g.sum(entropies), 1.0 / static_cast<double>(tokens.size()));
  t.baseline = model.baseline(g, step.state, step.option);
  return t;
}

namespace {

nn::Var clipped_surrogate(nn::Graph& g, nn::Var log_prob, double old_log_prob, double adv,
                          double eps) {
  nn::Var ratio = g.exp(g.add_scalar(log_prob, -old_log_prob));
  nn::Var plain = g.scale(ratio, adv);
  nn::Var clipped = g.scale(g.clamp(ratio, 1.0 - eps, 1.0 + eps), adv);
  return g.minimum(plain, clipped);
}

}  // namespace

nn::Var ppo_loss(nn::Graph& g, const HppoModel& model, std::span<const RolloutStep> steps,
                 const TrainConfig& config, LossBreakdown* breakdown) {
  if (steps.empty()) throw ContractViolation("PPO loss of an empty rollout");
  const double inv_n = 1.0 / static_cast<double>(steps.size());
  const double eps = config.clip_epsilon;
  std::vector<nn::Var> high_obj, low_obj, high_h, low_h, sq_err;
  for (const auto& step : steps) {
    StepTerms t = step_terms(g, model, step);
    high_obj.push_back(
        clipped_surrogate(g, t.option_log_prob, step.option_log_prob, step.update_adv_option, eps));
    low_obj.push_back(clipped_surrogate(g, t.token_log_prob, step.token_log_prob_sum(),
                                        step.update_adv_tokens, eps));
    high_h.push_back(t.option_entropy);
    low_h.push_back(t.token_entropy);
    sq_err.push_back(g.square(g.add_scalar(t.baseline, -step.ret)));
  }
  nn::Var mean_high_h = g.scale(g.sum(high_h), inv_n);
  nn::Var mean_low_h = g.scale(g.sum(low_h), inv_n);
  nn::Var high = g.sub(g.scale(g.sum(high_obj), -inv_n), g.scale(mean_high_h, config.entropy_coef));
  nn::Var low = g.sub(g.scale(g.sum(low_obj), -inv_n), g.scale(mean_low_h, config.entropy_coef));
  nn::Var base = g.scale(g.sum(sq_err), inv_n);
  const nn::Var parts[] = {high, low, base};
  nn::Var total = g.sum(parts);
  if (breakdown) {
    breakdown->high = high.item();
    breakdown->low = low.item();
    breakdown->baseline = base.item();
    breakdown->high_entropy = mean_high_h.item();
    breakdown->low_entropy = mean_low_h.item();
    breakdown->total = total.item();
  }
  return total;
}

UpdateDiagnostics ppo_update(HppoModel& model, std::span<const RolloutStep> steps,
                             const TrainConfig& config, const TrainableGroups& trainable) {
  UpdateDiagnostics diag;
  auto params = model.params().all();
  for (std::size_t epoch = 0; epoch < config.ppo_epochs; ++epoch) {
    model.params().zero_grad();
    nn::Graph g;
    LossBreakdown parts;
    nn::Var loss = ppo_loss(g, model, steps, config, &parts);
    if (!std::isfinite(parts.total)) {
      throw TrainingError("non-finite PPO loss in epoch " + std::to_string(epoch) +
                          " (high " + std::to_string(parts.high) + ", low " +
                          std::to_string(parts.low) + ", baseline " +
                          std::to_string(parts.baseline) + ")");
    }
    g.backward(loss);

    double sq = 0.0;
    for (const nn::Parameter* p : params) {
      if (!trainable.allows(p->group)) continue;
      for (double x : p->grad) sq += x * x;
    }
    const double norm = std::sqrt(sq);
    if (!std::isfinite(norm)) {
      throw TrainingError("non-finite gradient in epoch " + std::to_string(epoch));
    }
    const double factor =
        config.max_grad_norm > 0.0 && norm > config.max_grad_norm ? config.max_grad_norm / norm
                                                                   : 1.0;
    for (nn::Parameter* p : params) {
      if (!trainable.allows(p->group)) continue;
      double lr = 0.0;
      switch (p->group) {
        case nn::ParamGroup::kHighPolicy: lr = config.lr_high; break;
        case nn::ParamGroup::kLowPolicy:
        case nn::ParamGroup::kEmbedding: lr = config.lr_low; break;
        case nn::ParamGroup::kBaseline: lr = config.lr_baseline; break;
      }
      const double step = lr * factor;
      for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= step * p->grad[i];
    }
    if (epoch == 0) diag.first_epoch = parts;
    diag.last_epoch = parts;
    diag.grad_norm = norm;
  }
  model.params().zero_grad();
  return diag;
}

}  // namespace riskmine::hppo
