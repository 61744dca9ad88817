#pragma once

#include <cstddef>
#include <vector>

#include "riskmine/expr/factor_expr.hpp"
#include "riskmine/hppo/config.hpp"
#include "riskmine/hppo/environment.hpp"
#include "riskmine/hppo/model.hpp"
#include "riskmine/random.hpp"

namespace riskmine::hppo {

struct RolloutStep {
  std::size_t day = 0;
  State state{};
  std::size_t prev_option = 0;
  std::size_t option = 0;
  double option_log_prob = 0.0;
  std::vector<double> option_probs;  // pi_theta(. | state, prev_option)
  std::vector<double> b_low_all;     // b_low(state, k) for every option k
  expr::FactorExpr expr;
  std::vector<double> token_log_probs;

  double reward = 0.0;
  std::optional<double> ic_star;  // signed IC* behind the reward, if defined
  double b_high = 0.0;            // sum_k option_probs[k] * b_low_all[k]
  double b_low = 0.0;             // b_low_all[option]
  double ret = 0.0;
  double adv_option = 0.0;  // ret - b_high
  double adv_tokens = 0.0;  // ret - b_low
  // Advantages as consumed by the update (normalised per rollout when enabled).
  double update_adv_option = 0.0;
  double update_adv_tokens = 0.0;

  double token_log_prob_sum() const;
};

// Position in the day sequence and the last chosen option, carried from one
// rollout to the next.
struct RolloutCursor {
  std::size_t next_day = 0;
  std::size_t prev_option = 0;
};

struct Rollout {
  std::vector<RolloutStep> steps;
  std::size_t day_wraps = 0;  // times the day sequence restarted
};

// Samples rollout_length steps with the current policies, then evaluates the
// expressions in parallel and records rewards and both baselines.
Rollout collect_rollout(const HppoModel& model, FactorEnvironment& env, const TrainConfig& config,
                        Rng& rng, RolloutCursor& cursor);

// Draws one complete expression from pi_phi under grammar masking.
expr::FactorExpr sample_expression(const HppoModel& model, const State& state, std::size_t option,
                                   Rng& rng, std::vector<double>* token_log_probs = nullptr);

// Ret_t = r_t + gamma * Ret_{t+1}; raw advantages against the recorded
// baselines; update advantages optionally standardised per stream.
void compute_returns_advantages(std::vector<RolloutStep>& steps, double gamma, bool normalize);

}  // namespace riskmine::hppo
