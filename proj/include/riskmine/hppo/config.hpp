#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "riskmine/expr/evaluate.hpp"
#include "riskmine/expr/factor_expr.hpp"
#include "riskmine/metrics/reward.hpp"

namespace riskmine::hppo {

// None of these defaults come from a published run; they are tuning knobs.
struct PolicyConfig {
  std::size_t embedding_dim = 16;
  std::size_t heads = 1;
  std::size_t hidden_width = 64;
  std::size_t hidden_layers = 1;
  bool value_readout = false;
  bool enable_pow = false;
  std::size_t initial_option = 0;
  std::string catalog = "default";
};

struct TrainConfig {
  std::size_t rollout_length = 64;
  std::size_t ppo_epochs = 4;
  double clip_epsilon = 0.2;
  double lr_high = 3e-4;
  double lr_low = 3e-4;
  double lr_baseline = 3e-4;
  double entropy_coef = 0.01;
  double gamma = 1.0;
  std::size_t max_length = expr::kDefaultMaxLength;
  std::size_t iterations = 100;
  bool normalize_advantages = true;
  double max_grad_norm = 0.0;   // 0 disables clipping
  double target_pool_ic = 0.0;  // stop a phase once the pool best reaches this; 0 disables
  expr::Aggregation aggregation = expr::Aggregation::kMean;
  metrics::RewardConfig reward;

  void validate() const;
};

struct PoolConfig {
  std::size_t capacity = 50;
  double correlation_cap = 0.7;
};

struct TransferConfig {
  bool enabled = false;
  std::size_t pretrain_iterations = 100;
  bool reinit_high = false;  // phase 2 starts the high-level policy afresh
};

struct MiningConfig {
  std::uint64_t seed = 0;
  PolicyConfig policy;
  TrainConfig train;
  PoolConfig pool;
  TransferConfig transfer;

  void validate() const;
  // Stable hex digest of every setting; stored in checkpoints.
  std::string fingerprint() const;
};

}  // namespace riskmine::hppo
