#include "riskmine/hppo/config.hpp"

#include <cstdio>
#include <sstream>

#include "riskmine/error.hpp"
#include "riskmine/market/csv.hpp"

namespace riskmine::hppo {

void TrainConfig::validate() const {
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) throw ConfigError("train.clip_epsilon must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("train.gamma must lie in (0, 1]");
  if (rollout_length == 0) throw ConfigError("train.rollout_length must be positive");
  if (max_length == 0) throw ConfigError("train.max_length must be positive");
  if (lr_high < 0 || lr_low < 0 || lr_baseline < 0) throw ConfigError("learning rates must be nonnegative");
  if (entropy_coef < 0) throw ConfigError("train.entropy_coef must be nonnegative");
  if (max_grad_norm < 0) throw ConfigError("train.max_grad_norm must be nonnegative");
  if (!(reward.max_masked_fraction >= 0.0 && reward.max_masked_fraction <= 1.0)) {
    throw ConfigError("train.max_masked_fraction must lie in [0, 1]");
  }
  if (!(reward.rank_ic_weight >= 0.0 && reward.rank_ic_weight <= 1.0)) {
    throw ConfigError("train.rank_ic_weight must lie in [0, 1]");
  }
}

void MiningConfig::validate() const {
  train.validate();
  if (policy.embedding_dim == 0 || policy.hidden_width == 0) {
    throw ConfigError("policy widths must be positive");
  }
  if (policy.heads == 0 || policy.embedding_dim % policy.heads != 0) {
    throw ConfigError("policy.embedding_dim must be divisible by policy.heads");
  }
  if (policy.hidden_layers > 2) throw ConfigError("policy.hidden_layers must be at most 2");
  if (pool.capacity == 0) throw ConfigError("pool.capacity must be positive");
  if (!(pool.correlation_cap > 0.0 && pool.correlation_cap <= 1.0)) {
    throw ConfigError("pool.correlation_cap must lie in (0, 1]");
  }
}

std::string MiningConfig::fingerprint() const {
  using market::format_number;
  std::ostringstream s;
  s << "seed=" << seed << ";policy:" << policy.embedding_dim << ',' << policy.heads << ','
    << policy.hidden_width << ',' << policy.hidden_layers << ',' << policy.value_readout << ','
    << policy.enable_pow << ',' << policy.initial_option << ',' << policy.catalog
    << ";train:" << train.rollout_length << ',' << train.ppo_epochs << ','
    << format_number(train.clip_epsilon) << ',' << format_number(train.lr_high) << ','
    << format_number(train.lr_low) << ',' << format_number(train.lr_baseline) << ','
    << format_number(train.entropy_coef) << ',' << format_number(train.gamma) << ','
    << train.max_length << ',' << train.iterations << ',' << train.normalize_advantages << ','
    << format_number(train.max_grad_norm) << ',' << format_number(train.target_pool_ic) << ','
    << static_cast<int>(train.aggregation) << ','
    << format_number(train.reward.max_masked_fraction) << ','
    << format_number(train.reward.rank_ic_weight) << ";pool:" << pool.capacity << ','
    << format_number(pool.correlation_cap) << ";transfer:" << transfer.enabled << ','
    << transfer.pretrain_iterations << ',' << transfer.reinit_high;
  // FNV-1a, 64 bit
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace riskmine::hppo
