#include "riskmine/hppo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riskmine/error.hpp"
#include "riskmine/expr/option_catalog.hpp"
#include "riskmine/market/csv.hpp"

namespace riskmine::hppo {

Trainer::Trainer(HppoModel& model, FactorEnvironment& env, metrics::FactorPool& pool,
                 const TrainConfig& config, TrainableGroups trainable, Rng& rng,
                 std::string phase)
    : model_(model), env_(env), pool_(pool), config_(config), trainable_(trainable), rng_(rng),
      phase_(std::move(phase)) {
  config_.validate();
  if (env.catalog().size() != model.num_options()) {
    throw ConfigError("option catalog size differs from the model's option count");
  }
  cursor_.prev_option = model.config().initial_option;
}

void Trainer::admit(const Rollout& rollout) {
  for (const auto& step : rollout.steps) {
    if (!step.ic_star || step.reward <= 0.0) continue;
    if (!pool_.could_admit(std::fabs(*step.ic_star)) || pool_.contains(step.expr)) continue;
    auto scored = env_.score(step.expr);
    if (!scored.result.series) continue;
    pool_.admit(step.expr, std::move(scored.values), std::move(*scored.result.series));
  }
}

IterationStats Trainer::step() {
  ++iteration_;
  try {
    last_ = collect_rollout(model_, env_, config_, rng_, cursor_);
    compute_returns_advantages(last_.steps, config_.gamma, config_.normalize_advantages);
    auto diag = ppo_update(model_, last_.steps, config_, trainable_);
    admit(last_);

    IterationStats s;
    s.phase = phase_;
    s.iteration = iteration_;
    double sum = 0.0;
    for (const auto& st : last_.steps) {
      sum += st.reward;
      s.max_reward = std::max(s.max_reward, st.reward);
    }
    s.mean_reward = sum / static_cast<double>(last_.steps.size());
    s.pool_best_ic = pool_.best_score();
    s.entropy = diag.first_epoch.high_entropy;
    s.token_entropy = diag.first_epoch.low_entropy;
    s.day_wraps = last_.day_wraps;
    return s;
  } catch (const TrainingError& e) {
    throw TrainingError(phase_ + " iteration " + std::to_string(iteration_) + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw ContractViolation(phase_ + " iteration " + std::to_string(iteration_) + ": " +
                            e.what());
  }
}

std::vector<IterationStats> Trainer::run(std::size_t iterations, double target_pool_ic,
                                         const IterationHook& hook) {
  std::vector<IterationStats> log;
  for (std::size_t i = 0; i < iterations; ++i) {
    log.push_back(step());
    const bool stop_hook = hook && hook(log.back());
    if (stop_hook) break;
    if (target_pool_ic > 0.0 && log.back().pool_best_ic >= target_pool_ic) break;
  }
  return log;
}

namespace {

struct Streams {
  std::uint64_t model_seed;
  Rng rollout;
};

Streams make_streams(std::uint64_t seed) {
  Rng master(seed);
  const std::uint64_t model_seed = master.next();
  return {model_seed, master.split()};
}

FactorEnvironment make_env(PhaseData data, const MiningConfig& config) {
  return FactorEnvironment(std::move(data.panel), std::move(data.target),
                           expr::OptionCatalog::by_name(config.policy.catalog),
                           config.train.aggregation, config.train.reward);
}

}  // namespace

MiningResult train_from_scratch(PhaseData data, const MiningConfig& config,
                                const IterationHook& hook) {
  config.validate();
  auto env = make_env(std::move(data), config);
  auto streams = make_streams(config.seed);
  MiningResult r{HppoModel(config.policy, env.catalog().size(), config.train.max_length,
                           streams.model_seed),
                 metrics::FactorPool(config.pool.capacity, config.pool.correlation_cap),
                 {},
                 {}};
  Trainer trainer(r.model, env, r.pool, config.train, TrainableGroups::all(), streams.rollout,
                  "train");
  r.log = trainer.run(config.train.iterations, config.train.target_pool_ic, hook);
  r.meta = {config.fingerprint(), streams.rollout.state()};
  return r;
}

MiningResult pretrain_then_transfer(PhaseData historical, PhaseData recent,
                                    const MiningConfig& config, const IterationHook& hook) {
  config.validate();
  if (historical.panel.minutes_per_day() != recent.panel.minutes_per_day()) {
    throw ConfigError("historical and recent data differ in minutes per day (" +
                      std::to_string(historical.panel.minutes_per_day()) + " vs " +
                      std::to_string(recent.panel.minutes_per_day()) + ")");
  }
  auto streams = make_streams(config.seed);
  auto hist_env = make_env(std::move(historical), config);
  MiningResult r{HppoModel(config.policy, hist_env.catalog().size(), config.train.max_length,
                           streams.model_seed),
                 metrics::FactorPool(config.pool.capacity, config.pool.correlation_cap),
                 {},
                 {}};
  {
    metrics::FactorPool pretrain_pool(config.pool.capacity, config.pool.correlation_cap);
    Trainer pre(r.model, hist_env, pretrain_pool, config.train, TrainableGroups::all(),
                streams.rollout, "pretrain");
    r.log = pre.run(config.transfer.pretrain_iterations, 0.0, hook);
  }
  auto recent_env = make_env(std::move(recent), config);
  if (config.transfer.reinit_high) r.model.reinitialize_high(streams.rollout);
  Trainer fine(r.model, recent_env, r.pool, config.train, TrainableGroups::high_and_baseline(),
               streams.rollout, "finetune");
  auto log = fine.run(config.train.iterations, config.train.target_pool_ic, hook);
  r.log.insert(r.log.end(), log.begin(), log.end());
  r.meta = {config.fingerprint(), streams.rollout.state()};
  return r;
}

MiningResult mine(PhaseData historical, PhaseData recent, const MiningConfig& config,
                  const IterationHook& hook) {
  if (config.transfer.enabled) {
    return pretrain_then_transfer(std::move(historical), std::move(recent), config, hook);
  }
  return train_from_scratch(std::move(recent), config, hook);
}

void save_model(const MiningResult& result, const std::filesystem::path& path) {
  nn::save_checkpoint(result.model.params(), result.meta, path);
}

std::string iteration_log_header() {
  return "phase,iteration,mean_reward,max_reward,pool_best_ic,entropy,token_entropy";
}

std::string iteration_log_row(const IterationStats& s) {
  using market::format_number;
  std::ostringstream o;
  o << s.phase << ',' << s.iteration << ',' << format_number(s.mean_reward) << ','
    << format_number(s.max_reward) << ',' << format_number(s.pool_best_ic) << ','
    << format_number(s.entropy) << ',' << format_number(s.token_entropy);
  return o.str();
}

}  // namespace riskmine::hppo
