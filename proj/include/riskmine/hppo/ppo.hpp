#pragma once

#include <span>

#include "riskmine/hppo/config.hpp"
#include "riskmine/hppo/model.hpp"
#include "riskmine/hppo/rollout.hpp"
#include "riskmine/nn/graph.hpp"

namespace riskmine::hppo {

// Which parameter groups receive updates.
struct TrainableGroups {
  bool high = true;
  bool low = true;
  bool embedding = true;
  bool baseline = true;

  bool allows(nn::ParamGroup group) const;
  static TrainableGroups all() { return {}; }
  // Fine-tuning phase: pi_phi and W_C frozen.
  static TrainableGroups high_and_baseline() { return {true, false, false, true}; }
};

// Differentiable quantities of one recorded step under the current parameters.
struct StepTerms {
  nn::Var option_log_prob;
  nn::Var option_entropy;
  nn::Var token_log_prob;  // summed over the expression
  nn::Var token_entropy;   // mean over the expression's decoding positions
  nn::Var baseline;        // b_low(state, option)
};
StepTerms step_terms(nn::Graph& g, const HppoModel& model, const RolloutStep& step);

struct LossBreakdown {
  double high = 0.0;      // clipped surrogate of pi_theta
  double low = 0.0;       // clipped surrogate of pi_phi
  double baseline = 0.0;  // mean squared error of b_low against returns
  double high_entropy = 0.0;
  double low_entropy = 0.0;
  double total = 0.0;
};

// high + low + baseline, where each surrogate is
//   -mean(min(rho * A, clip(rho, 1 - eps, 1 + eps) * A)) - entropy_coef * mean(H).
nn::Var ppo_loss(nn::Graph& g, const HppoModel& model, std::span<const RolloutStep> steps,
                 const TrainConfig& config, LossBreakdown* breakdown = nullptr);

struct UpdateDiagnostics {
  LossBreakdown first_epoch;
  LossBreakdown last_epoch;
  double grad_norm = 0.0;  // last epoch, before clipping
};

// ppo_epochs full-batch passes of plain SGD with per-group learning rates.
// Frozen groups are left bit-for-bit untouched. Throws TrainingError if the
// loss or a gradient is not finite; parameters are then left as they were
// before the failing epoch.
UpdateDiagnostics ppo_update(HppoModel& model, std::span<const RolloutStep> steps,
                             const TrainConfig& config,
                             const TrainableGroups& trainable = TrainableGroups::all());

}  // namespace riskmine::hppo
