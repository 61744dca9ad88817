#include "riskmine/hppo/rollout.hpp"

#include <cmath>

#include "riskmine/error.hpp"
#include "riskmine/expr/grammar.hpp"
#include "riskmine/nn/categorical.hpp"

namespace riskmine::hppo {

double RolloutStep::token_log_prob_sum() const {
  double s = 0.0;
  for (double x : token_log_probs) s += x;
  return s;
}

expr::FactorExpr sample_expression(const HppoModel& model, const State& state, std::size_t option,
                                   Rng& rng, std::vector<double>* token_log_probs) {
  expr::FactorExpr e;
  e.option_id = option;
  if (token_log_probs) token_log_probs->clear();
  const auto& vocab = model.vocab();
  nn::Graph g;
  while (e.tokens.empty() || expr::open_slots(e.tokens) > 0) {
    if (e.tokens.size() >= model.max_length()) {
      throw ContractViolation("decoder exceeded max_length despite masking");
    }
    auto mask = expr::legal_mask(vocab, e.tokens, model.max_length());
    nn::Var logits = model.low_logits(g, state, option, e.tokens);
    auto probs = nn::masked_softmax(logits.value(), mask);
    const std::size_t i = nn::sample_index(probs, rng);
    e.tokens.push_back(vocab.at(i));
    if (token_log_probs) token_log_probs->push_back(std::log(probs[i]));
  }
  expr::require_valid(e, model.max_length());
  return e;
}

Rollout collect_rollout(const HppoModel& model, FactorEnvironment& env, const TrainConfig& config,
                        Rng& rng, RolloutCursor& cursor) {
  const std::size_t days = env.states().num_days();
  if (days == 0) throw InsufficientDataError("no days to roll out on");
  if (cursor.prev_option >= model.num_options()) {
    throw ContractViolation("previous option outside the catalog");
  }
  Rollout out;
  out.steps.resize(config.rollout_length);
  for (auto& step : out.steps) {
    if (cursor.next_day >= days) {
      cursor.next_day = 0;
      ++out.day_wraps;
    }
    step.day = cursor.next_day++;
    step.state = env.states().state(step.day);
    step.prev_option = cursor.prev_option;
    step.option_probs = model.option_probs(step.state, step.prev_option);
    step.option = nn::sample_index(step.option_probs, rng);
    step.option_log_prob = std::log(step.option_probs[step.option]);
    step.b_low_all = model.baselines(step.state);
    step.b_high = baseline_high(step.option_probs, step.b_low_all);
    step.b_low = step.b_low_all[step.option];
    step.expr = sample_expression(model, step.state, step.option, rng, &step.token_log_probs);
    cursor.prev_option = step.option;
  }

  std::vector<expr::FactorExpr> batch;
  batch.reserve(out.steps.size());
  for (const auto& step : out.steps) batch.push_back(step.expr);
  auto evals = env.evaluate_batch(batch);
  for (std::size_t t = 0; t < out.steps.size(); ++t) {
    out.steps[t].reward = evals[t].reward;
    out.steps[t].ic_star = evals[t].ic_star;
  }
  return out;
}

namespace {

void standardize(std::vector<RolloutStep>& steps, double RolloutStep::*field) {
  const double n = static_cast<double>(steps.size());
  double mean = 0.0;
  for (const auto& s : steps) mean += s.*field;
  mean /= n;
  double var = 0.0;
  for (const auto& s : steps) var += (s.*field - mean) * (s.*field - mean);
  const double sd = std::sqrt(var / n);
  for (auto& s : steps) s.*field = sd > 1e-8 ? (s.*field - mean) / sd : s.*field - mean;
}

}  // namespace

void compute_returns_advantages(std::vector<RolloutStep>& steps, double gamma, bool normalize) {
  double running = 0.0;
  for (std::size_t i = steps.size(); i-- > 0;) {
    running = steps[i].reward + gamma * running;
    steps[i].ret = running;
  }
  for (auto& s : steps) {
    s.adv_option = s.ret - s.b_high;
    s.adv_tokens = s.ret - s.b_low;
    s.update_adv_option = s.adv_option;
    s.update_adv_tokens = s.adv_tokens;
  }
  if (normalize && steps.size() > 1) {
    standardize(steps, &RolloutStep::update_adv_option);
    standardize(steps, &RolloutStep::update_adv_tokens);
  }
}

}  // namespace riskmine::hppo
