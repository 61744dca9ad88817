#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "riskmine/hppo/config.hpp"
#include "riskmine/hppo/environment.hpp"
#include "riskmine/hppo/model.hpp"
#include "riskmine/hppo/ppo.hpp"
#include "riskmine/hppo/rollout.hpp"
#include "riskmine/market/panel.hpp"
#include "riskmine/metrics/pool.hpp"
#include "riskmine/nn/checkpoint.hpp"
#include "riskmine/random.hpp"

namespace riskmine::hppo {

struct IterationStats {
  std::string phase;
  std::size_t iteration = 0;  // 1-based within the phase
  double mean_reward = 0.0;
  double max_reward = 0.0;
  double pool_best_ic = 0.0;
  double entropy = 0.0;  // mean high-level policy entropy over the rollout
  double token_entropy = 0.0;
  std::size_t day_wraps = 0;
};

// Called after every iteration; returning true ends the phase early.
using IterationHook = std::function<bool(const IterationStats&)>;

// One phase of training iterations: rollout, returns and advantages, PPO
// update of the trainable groups, pool admission of the rollout's factors.
class Trainer {
 public:
  Trainer(HppoModel& model, FactorEnvironment& env, metrics::FactorPool& pool,
          const TrainConfig& config, TrainableGroups trainable, Rng& rng, std::string phase);

  IterationStats step();

  // Runs up to `iterations` steps; stops early when the pool best reaches
  // target_pool_ic (if positive) or the hook asks to.
  std::vector<IterationStats> run(std::size_t iterations, double target_pool_ic = 0.0,
                                  const IterationHook& hook = {});

  const Rollout& last_rollout() const { return last_; }

 private:
  void admit(const Rollout& rollout);

  HppoModel& model_;
  FactorEnvironment& env_;
  metrics::FactorPool& pool_;
  TrainConfig config_;
  TrainableGroups trainable_;
  Rng& rng_;
  std::string phase_;
  RolloutCursor cursor_;
  Rollout last_;
  std::size_t iteration_ = 0;
};

struct PhaseData {
  market::Panel panel;
  market::RvTarget target;
};

struct MiningResult {
  HppoModel model;
  metrics::FactorPool pool;
  std::vector<IterationStats> log;
  nn::CheckpointMeta meta;
};

// Single-phase training of every parameter group for config.train.iterations.
MiningResult train_from_scratch(PhaseData data, const MiningConfig& config,
                                const IterationHook& hook = {});

// Phase 1 ("pretrain") trains everything on historical data for
// transfer.pretrain_iterations; phase 2 ("finetune") freezes pi_phi and W_C,
// keeps or redraws theta, and trains theta and the baseline on recent data
// for train.iterations. The pool holds phase-2 factors only. The hook sees
// both phases; it can end either one.
MiningResult pretrain_then_transfer(PhaseData historical, PhaseData recent,
                                    const MiningConfig& config, const IterationHook& hook = {});

// Dispatches on config.transfer.enabled; `historical` is ignored when off.
MiningResult mine(PhaseData historical, PhaseData recent, const MiningConfig& config,
                  const IterationHook& hook = {});

void save_model(const MiningResult& result, const std::filesystem::path& path);

// Per-iteration log: phase,iteration,mean_reward,max_reward,pool_best_ic,entropy,token_entropy
std::string iteration_log_header();
std::string iteration_log_row(const IterationStats& s);

}  // namespace riskmine::hppo
