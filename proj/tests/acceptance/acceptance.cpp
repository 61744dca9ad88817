// Acceptance harness: one PASS/FAIL line per criterion. With arguments, only
// the listed criterion numbers run.

#include <algorithm>
#include <cstring>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "riskmine/backtest/backtest.hpp"
#include "riskmine/cli/commands.hpp"
#include "riskmine/cli/run_config.hpp"
#include "riskmine/error.hpp"
#include "riskmine/expr/evaluate.hpp"
#include "riskmine/expr/formula.hpp"
#include "riskmine/expr/grammar.hpp"
#include "riskmine/hppo/ppo.hpp"
#include "riskmine/hppo/rollout.hpp"
#include "riskmine/hppo/trainer.hpp"
#include "riskmine/market/synthetic.hpp"
#include "riskmine/metrics/correlation.hpp"
#include "riskmine/metrics/ic.hpp"
#include "riskmine/metrics/pool.hpp"
#include "test_support.hpp"

using namespace riskmine;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------- 1

long double bf_pearson(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<std::uint8_t>& valid) {
  long double mx = 0, my = 0, n = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (valid[i]) mx += x[i], my += y[i], n += 1;
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!valid[i]) continue;
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Rank by counting: 1 + #smaller + (#equal - 1) / 2 over the valid subset.
std::vector<double> bf_ranks(const std::vector<double>& x, const std::vector<std::uint8_t>& valid) {
  std::vector<double> r(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!valid[i]) continue;
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!valid[j]) continue;
      if (x[j] < x[i]) less += 1;
      if (x[j] == x[i]) equal += 1;
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

long double bf_spearman(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<std::uint8_t>& valid) {
  return bf_pearson(bf_ranks(x, valid), bf_ranks(y, valid), valid);
}

Outcome metric_oracles() {
  Rng rng(1001);
  double worst = 0.0;
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 3 + rng.below(60);
    std::vector<double> x(n), y(n);
    std::vector<std::uint8_t> valid(n, 1);
    const bool ties = rng.uniform() < 0.5;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = ties ? static_cast<double>(rng.below(6)) : rng.normal();
      y[i] = 0.5 * x[i] + (ties ? static_cast<double>(rng.below(4)) : rng.normal());
      if (rng.uniform() < 0.1) valid[i] = 0;
    }
    const auto p = metrics::try_pearson(x, y, valid);
    const auto s = metrics::try_spearman(x, y, valid);
    if (!p || !s) continue;  // fewer than 2 valid points or a constant side
    worst = std::max(worst, static_cast<double>(std::fabs(*p - bf_pearson(x, y, valid))));
    worst = std::max(worst, static_cast<double>(std::fabs(*s - bf_spearman(x, y, valid))));
    ++checked;
  }
  // ic_series against per-day brute force.
  for (int t = 0; t < 1000; ++t) {
    const std::size_t days = 1 + rng.below(8), symbols = 4 + rng.below(30);
    auto f = rmtest::random_grid(rng, days, symbols, 0.1);
    auto g = rmtest::random_grid(rng, days, symbols, 0.1);
    metrics::IcSeries series;
    try {
      series = metrics::ic_series(f, g);
    } catch (const InsufficientDataError&) {
      continue;
    }
    long double sum_ic = 0, sum_rank = 0;
    std::size_t k = 0;
    for (std::size_t d = 0; d < days; ++d) {
      std::vector<double> x(symbols), y(symbols);
      std::vector<std::uint8_t> valid(symbols);
      std::size_t nv = 0;
      for (std::size_t s = 0; s < symbols; ++s) {
        x[s] = f.at(d, s);
        y[s] = g.at(d, s);
        valid[s] = f.is_valid(d, s) && g.is_valid(d, s);
        nv += valid[s];
      }
      if (nv < 2) continue;
      if (k >= series.days.size() || series.days[k] != d) return {false, "day set differs"};
      const long double ic = bf_pearson(x, y, valid), rk = bf_spearman(x, y, valid);
      worst = std::max(worst, static_cast<double>(std::fabs(series.daily_ic[k] - ic)));
      worst = std::max(worst, static_cast<double>(std::fabs(series.daily_rank_ic[k] - rk)));
      sum_ic += ic;
      sum_rank += rk;
      ++k;
    }
    if (k != series.days.size()) return {false, "day count differs"};
    worst = std::max(worst, static_cast<double>(std::fabs(series.ic_star - sum_ic / k)));
    worst = std::max(worst, static_cast<double>(std::fabs(series.rank_ic_star - sum_rank / k)));
    ++checked;
  }
  return {worst < 1e-12, std::to_string(checked) + " instances, max abs error " + fmt("%.3g", worst)};
}

// ---------------------------------------------------------------- 2

Outcome gradient_check() {
  const auto catalog = expr::OptionCatalog::default_catalog();
  market::SyntheticSpec spec;
  spec.symbols = 12;
  spec.days = 8;
  spec.minutes = 6;
  spec.noise_sd = 0.3;
  auto data = market::generate_synthetic(spec, expr::parse("((0.5·close)+(0.1·volume))", catalog),
                                         catalog);
  hppo::FactorEnvironment env(data.panel, data.target, catalog);
  double worst = 0.0;
  std::size_t checked = 0;
  std::string where;
  Rng rng(2002);
  for (int batch = 0; batch < 20; ++batch) {
    hppo::PolicyConfig pc;
    pc.embedding_dim = 8;
    pc.hidden_width = 12;
    pc.heads = batch % 2 ? 2 : 1;
    pc.hidden_layers = 1 + batch % 3 / 2;
    pc.value_readout = batch % 4 >= 2;
    pc.enable_pow = batch % 5 == 0;
    hppo::HppoModel model(pc, catalog.size(), expr::kDefaultMaxLength, rng.next());
    hppo::TrainConfig tc;
    tc.rollout_length = 4;
    Rng roll(rng.next());
    hppo::RolloutCursor cursor{static_cast<std::size_t>(rng.below(spec.days)), 0};
    auto r = hppo::collect_rollout(model, env, tc, roll, cursor);
    hppo::compute_returns_advantages(r.steps, 0.9, true);
    // Old log-probs from an earlier epoch: ratios away from 1.
    for (auto& s : r.steps) {
      s.option_log_prob += rng.uniform(-0.15, 0.15);
      s.token_log_probs[0] += rng.uniform(-0.15, 0.15);
    }
    auto res = rmtest::gradient_check(model.params(), [&](nn::Graph& g) {
      return hppo::ppo_loss(g, model, r.steps, tc);
    });
    checked += res.checked;
    if (res.max_rel_error > worst) {
      worst = res.max_rel_error;
      where = res.worst;
    }
  }
  return {worst < 1e-4, "20 minibatches, " + std::to_string(checked) +
                            " parameter entries, max relative error " + fmt("%.3g", worst) +
                            (where.empty() ? "" : " at " + where)};
}

// ---------------------------------------------------------------- 3

Outcome baseline_identity() {
  const auto catalog = expr::OptionCatalog::default_catalog();
  market::SyntheticSpec spec;
  spec.symbols = 20;
  spec.days = 30;
  spec.minutes = 10;
  auto data = market::generate_synthetic(spec, expr::parse("((0.5·close)+(0.1·volume))", catalog),
                                         catalog);
  hppo::FactorEnvironment env(data.panel, data.target, catalog);
  hppo::HppoModel model(hppo::PolicyConfig{}, catalog.size(), expr::kDefaultMaxLength, 3003);
  hppo::TrainConfig tc;
  tc.rollout_length = 64;
  Rng rng(3004);
  hppo::RolloutCursor cursor;
  auto r = hppo::collect_rollout(model, env, tc, rng, cursor);
  double worst = 0.0;
  for (const auto& s : r.steps) {
    const auto probs = model.option_probs(s.state, s.prev_option);
    const auto b_low = model.baselines(s.state);
    long double direct = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) direct += probs[k] * b_low[k];
    worst = std::max(worst, static_cast<double>(std::fabs(s.b_high - direct)));
  }
  return {r.steps.size() == 64 && worst <= 1e-9,
          std::to_string(r.steps.size()) + " steps, max |b_high - sum pi*b_low| " +
              fmt("%.3g", worst)};
}

// ---------------------------------------------------------------- 4

Outcome grammar_safety() {
  const auto catalog = expr::OptionCatalog::default_catalog();
  Rng rng(4004);
  // Prices spanning many orders of magnitude, zero volumes, masked minutes.
  market::Panel panel(rmtest::test_days(4), rmtest::test_symbols(8), 8);
  for (std::size_t d = 0; d < 4; ++d)
    for (std::size_t s = 0; s < 8; ++s)
      for (std::size_t m = 0; m < 8; ++m) {
        const double scale = std::pow(10.0, static_cast<double>(rng.below(9)) * 40.0 - 160.0);
        const double open = scale * rng.uniform(0.5, 2.0);
        const double close = scale * rng.uniform(0.5, 2.0);
        const double volume = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 1e6);
        panel.set_bar(d, s, m, {open, std::max(open, close), std::min(open, close), close, volume,
                                0.5 * (open + close)});
        if (rng.uniform() < 0.05) panel.mask(d, s, m);
      }
  hppo::PolicyConfig pc;
  pc.enable_pow = true;
  hppo::HppoModel model(pc, catalog.size(), expr::kDefaultMaxLength, 4005);
  std::size_t bad_expr = 0, bad_cells = 0, longest = 0;
  for (int i = 0; i < 100000; ++i) {
    hppo::State state;
    for (auto& x : state) x = 2.0 * rng.normal();
    auto e = hppo::sample_expression(model, state, rng.below(catalog.size()), rng);
    longest = std::max(longest, e.tokens.size());
    if (!expr::is_valid(e.tokens, expr::kDefaultMaxLength)) ++bad_expr;
    auto values = expr::evaluate(e, catalog, panel);
    for (double v : values.values) bad_cells += !std::isfinite(v);
  }
  return {bad_expr == 0 && bad_cells == 0 && longest <= 15,
          "100000 decoded expressions, " + std::to_string(bad_expr) + " invalid, longest " +
              std::to_string(longest) + " tokens, " + std::to_string(bad_cells) +
              " non-finite cells"};
}

// ---------------------------------------------------------------- 5 and 10

// Desk-scale oracle-recovery run: noiseless 50 x 60 x 30 panel, planted
// sub(high, low) under option 0. The equal weights cancel the price level, so
// no single feature and no other option tracks the target.
const char* kRecoveryConfig = R"([data]
source = synthetic

[data.synthetic]
symbols = 50
days = 60
minutes = 30
noise_sd = 0
planted = ((0.3·high)-(0.3·low))

[policy]
embedding_dim = 16
hidden_width = 64

[train]
rollout_length = 64
ppo_epochs = 4
lr_high = 0.01
lr_low = 0.01
lr_baseline = 0.01
entropy_coef = 0.01
gamma = 0.5
iterations = 500
target_pool_ic = 0.8

[pool]
capacity = 50
)";

struct MineRun {
  int exit_code = -1;
  std::size_t iterations = 0;
  double best_abs_ic = -1.0;
  std::string best_formula;
};

MineRun run_mine(const fs::path& dir, std::uint64_t seed) {
  fs::create_directories(dir);
  const fs::path cfg = dir / "recovery.ini";
  {
    std::ofstream out(cfg);
    out << kRecoveryConfig;
  }
  const std::string seed_text = std::to_string(seed);
  const std::string cfg_text = cfg.string(), out_text = dir.string();
  const char* argv[] = {"riskmine", "mine",    "-c",  cfg_text.c_str(), "--seed",
                        seed_text.c_str(), "-o", out_text.c_str(), "--force"};
  std::ostringstream sink;
  MineRun r;
  r.exit_code = cli::run_cli(9, argv, sink, std::cerr);
  if (r.exit_code != 0) return r;
  {
    std::ifstream log(dir / "iterations.csv");
    std::string line;
    while (std::getline(log, line)) ++r.iterations;
    r.iterations -= 1;  // header
  }
  // |IC*| of every pool entry, recomputed on the mining data.
  auto config = cli::load_run_config(cfg, {"seed=" + seed_text});
  auto data = cli::load_training_data(config);
  const auto catalog = expr::OptionCatalog::by_name(config.mining.policy.catalog);
  for (const auto& e : cli::load_pool(config, dir / "pool.tsv")) {
    auto series = metrics::ic_series(expr::evaluate(e, catalog, data.recent.panel),
                                     data.recent.target);
    if (std::fabs(series.ic_star) > r.best_abs_ic) {
      r.best_abs_ic = std::fabs(series.ic_star);
      r.best_formula = expr::serialize(e, catalog);
    }
  }
  return r;
}

const fs::path kWorkDir = fs::temp_directory_path() / "riskmine_acceptance";

Outcome oracle_recovery() {
  int successes = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = run_mine(kWorkDir / ("recovery_" + std::to_string(seed)), seed);
    const bool ok = r.exit_code == 0 && r.iterations <= 500 && r.best_abs_ic >= 0.8;
    successes += ok;
    detail += (seed ? "; " : "") + std::string("seed ") + std::to_string(seed) + ": |IC*| " +
              fmt("%.4f", r.best_abs_ic) + " after " + std::to_string(r.iterations) +
              " it (" + fmt("%.0f", seconds_since(t0)) + " s)";
    std::cerr << "  recovery seed " << seed << ": exit " << r.exit_code << ", " << r.iterations
              << " iterations, best |IC*| " << r.best_abs_ic << " " << r.best_formula
              << '\n';
  }
  return {successes >= 4, std::to_string(successes) + "/5 seeds reach |IC*| >= 0.8 [" + detail + "]"};
}

Outcome determinism() {
  const auto a = kWorkDir / "recovery_0";
  if (!fs::exists(a / "pool.tsv")) run_mine(a, 0);
  const auto b = kWorkDir / "recovery_0_rerun";
  auto r = run_mine(b, 0);
  if (r.exit_code != 0) return {false, "rerun failed"};
  const bool pool_same = read_bytes(a / "pool.tsv") == read_bytes(b / "pool.tsv");
  const bool ckpt_same = read_bytes(a / "checkpoint.bin") == read_bytes(b / "checkpoint.bin");
  const bool log_same = read_bytes(a / "iterations.csv") == read_bytes(b / "iterations.csv");
  return {pool_same && ckpt_same,
          std::string("pool ") + (pool_same ? "identical" : "DIFFERS") + ", checkpoint " +
              (ckpt_same ? "identical" : "DIFFERS") + ", iteration log " +
              (log_same ? "identical" : "DIFFERS")};
}

// ---------------------------------------------------------------- 6

hppo::MiningConfig transfer_config(std::uint64_t seed) {
  hppo::MiningConfig m;
  m.seed = seed;
  m.train.rollout_length = 64;
  m.train.lr_high = m.train.lr_low = m.train.lr_baseline = 0.01;
  m.train.gamma = 0.5;
  m.train.iterations = 300;
  m.transfer.enabled = true;
  m.transfer.pretrain_iterations = 150;
  return m;
}

hppo::PhaseData shifted_data(std::uint64_t seed, std::size_t option) {
  const auto catalog = expr::OptionCatalog::default_catalog();
  auto planted = expr::parse("((0.3·high)-(0.3·low))", catalog);
  planted.option_id = option;
  market::SyntheticSpec spec;
  spec.symbols = 50;
  spec.days = 60;
  spec.minutes = 30;
  spec.seed = seed;
  auto d = market::generate_synthetic(spec, planted, catalog);
  return {std::move(d.panel), std::move(d.target)};
}

std::vector<double> group_bytes(const hppo::HppoModel& m, nn::ParamGroup g) {
  std::vector<double> out;
  for (const auto* p : m.params().all())
    if (p->group == g) out.insert(out.end(), p->value.begin(), p->value.end());
  return out;
}

Outcome transfer_benefit() {
  constexpr double kThreshold = 0.8;
  std::vector<double> transfer_its, scratch_its;
  std::string detail;
  bool frozen = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto cfg = transfer_config(seed);
    const std::size_t budget = cfg.train.iterations;
    // Historical regime: option 4. Recent regime: same tree under option 0.
    std::size_t t_hit = budget + 1, s_hit = budget + 1;
    auto transfer = hppo::pretrain_then_transfer(
        shifted_data(100 + seed, 4), shifted_data(200 + seed, 0), cfg,
        [&](const hppo::IterationStats& s) {
          if (s.phase != "finetune" || s.max_reward < kThreshold) return false;
          t_hit = s.iteration;
          return true;
        });
    auto scratch_cfg = cfg;
    scratch_cfg.transfer.enabled = false;
    auto scratch = hppo::train_from_scratch(
        shifted_data(200 + seed, 0), scratch_cfg, [&](const hppo::IterationStats& s) {
          if (s.max_reward < kThreshold) return false;
          s_hit = s.iteration;
          return true;
        });
    transfer_its.push_back(static_cast<double>(t_hit));
    scratch_its.push_back(static_cast<double>(s_hit));
    detail += (seed ? "; " : "") + std::to_string(t_hit) + " vs " + std::to_string(s_hit);
    std::cerr << "  transfer seed " << seed << ": finetune " << t_hit << ", scratch " << s_hit
              << '\n';

    if (seed == 0) {
      // Freeze contract: the fine-tuned model keeps the pretrained low-level
      // policy and option embedding byte for byte.
      auto pre_cfg = cfg;
      pre_cfg.transfer.enabled = false;
      pre_cfg.train.iterations = cfg.transfer.pretrain_iterations;
      pre_cfg.train.target_pool_ic = 0.0;
      auto pretrained = hppo::train_from_scratch(shifted_data(100 + seed, 4), pre_cfg);
      for (auto g : {nn::ParamGroup::kLowPolicy, nn::ParamGroup::kEmbedding}) {
        const auto a = group_bytes(transfer.model, g), b = group_bytes(pretrained.model, g);
        frozen = frozen && a.size() == b.size() &&
                 std::equal(a.begin(), a.end(), b.begin(), [](double x, double y) {
                   return std::memcmp(&x, &y, sizeof x) == 0;
                 });
      }
    }
  }
  const double mt = median(transfer_its), ms = median(scratch_its);
  return {mt <= 0.7 * ms && frozen,
          "median iterations to reward >= 0.8: transfer " + fmt("%.0f", mt) + " vs scratch " +
              fmt("%.0f", ms) + " (ratio " + fmt("%.2f", mt / ms) + ") [" + detail +
              "]; freeze contract " + (frozen ? "holds" : "BROKEN")};
}

// ---------------------------------------------------------------- 7

Outcome pool_monotonicity() {
  const auto catalog = expr::OptionCatalog::default_catalog();
  market::SyntheticSpec spec;
  spec.symbols = 30;
  spec.days = 20;
  spec.minutes = 10;
  spec.noise_sd = 0.5;
  auto data = market::generate_synthetic(spec, expr::parse("((0.5·close)+(0.1·volume))", catalog),
                                         catalog);
  expr::Vocabulary vocab;
  Rng rng(7007);
  struct Candidate {
    expr::FactorExpr e;
    expr::FactorValues values;
    metrics::IcSeries series;
  };
  std::vector<Candidate> stream;
  while (stream.size() < 500) {
    auto e = rmtest::random_expression(rng, vocab, catalog.size());
    auto values = expr::evaluate(e, catalog, data.panel);
    auto scored = metrics::score_factor(values, data.target);
    if (!scored.series) continue;
    stream.push_back({e, std::move(values), std::move(*scored.series)});
  }
  std::vector<double> best;
  std::string detail;
  for (std::size_t cap : {10, 30, 50, 70, 90}) {
    metrics::FactorPool pool(cap, 0.7);
    for (const auto& c : stream) pool.admit(c.e, c.values, c.series);
    best.push_back(pool.best_score());
    detail += (detail.empty() ? "" : ", ") + std::to_string(cap) + ": " + fmt("%.6f", best.back());
  }
  bool ok = true;
  for (std::size_t i = 1; i < best.size(); ++i) ok = ok && best[i] >= best[i - 1];
  return {ok, "best pool IC* by capacity " + detail};
}

// ---------------------------------------------------------------- 8

Outcome backtest_correctness() {
  std::vector<std::string> failures;
  // Pencil case: 3 symbols, 3 days, top 2 by lowest factor.
  {
    market::Panel p(rmtest::test_days(3), rmtest::test_symbols(3), 2);
    const double closes[3][3] = {{10, 20, 40}, {11, 19, 42}, {12, 20.9, 42}};
    for (std::size_t d = 0; d < 3; ++d)
      for (std::size_t s = 0; s < 3; ++s)
        for (std::size_t m = 0; m < 2; ++m) {
          const double c = closes[d][s];
          p.set_bar(d, s, m, {c, c, c, c, 1.0, c});
        }
    market::DailyGrid f(3, 3);
    const double fv[3][3] = {{1, 2, 4}, {3, 1, 2}, {1, 1, 1}};
    for (std::size_t d = 0; d < 3; ++d)
      for (std::size_t s = 0; s < 3; ++s) f.set(d, s, fv[d][s]);
    backtest::PortfolioConfig cfg;
    cfg.top_n = 2;
    auto r = backtest::run_backtest(f, p, cfg);
    if (std::fabs(r.net_value[1] - 1.05) > 1e-9 || std::fabs(r.net_value[2] - 1.12) > 1e-9) {
      failures.push_back("pencil case");
    }
  }
  // No lookahead on 50 random panels; weights sum to one everywhere.
  Rng rng(8008);
  double worst_sum = 0.0;
  std::size_t rebalances = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t days = 8;
    auto panel = rmtest::random_panel(rng, days, 40, 3, 0.02);
    auto factor = rmtest::random_grid(rng, days, 40, 0.05);
    for (auto& v : factor.values) v = rng.normal();
    backtest::PortfolioConfig cfg;
    auto full = backtest::run_backtest(factor, panel, cfg);
    for (const auto& reb : full.rebalances) {
      double sum = 0.0;
      for (double w : reb.weights) sum += w;
      worst_sum = std::max(worst_sum, std::fabs(sum - 1.0));
      ++rebalances;
    }
    for (std::size_t d = 1; d < days; ++d) {
      market::DailyGrid cut(d + 1, 40);
      std::copy_n(factor.values.begin(), (d + 1) * 40, cut.values.begin());
      std::copy_n(factor.valid.begin(), (d + 1) * 40, cut.valid.begin());
      auto part = backtest::run_backtest(cut, panel.slice_days(0, d), cfg);
      for (std::size_t k = 0; k <= d; ++k) {
        if (part.net_value[k] != full.net_value[k]) {
          failures.push_back("lookahead on panel " + std::to_string(t));
          d = days;
          break;
        }
      }
    }
  }
  if (worst_sum > 1e-12) failures.push_back("weight sum");
  std::string detail = "pencil case, 50 truncation panels, " + std::to_string(rebalances) +
                       " rebalances with max |sum w - 1| " + fmt("%.3g", worst_sum);
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

// ---------------------------------------------------------------- 9

Outcome round_trip_and_fixtures() {
  Rng rng(9009);
  expr::Vocabulary vocab(true);
  std::size_t mismatches = 0;
  const auto def = expr::OptionCatalog::default_catalog();
  const auto pub = expr::OptionCatalog::published_catalog();
  for (int i = 0; i < 10000; ++i) {
    const auto& catalog = i % 2 ? pub : def;
    auto e = rmtest::random_expression(rng, vocab, catalog.size());
    expr::ParseOptions opts{true, e.option_id};
    if (expr::parse(expr::serialize(e, catalog), catalog, opts) != e) ++mismatches;
  }
  struct Row {
    const char* text;
    bool needs_pow;
  };
  const Row rows[] = {
      {"(0.1·open)·(0.3·low)−(0.18·volume)/(0.4·vwap)", false},
      {"(0.1·open)−(0.1·low)·(0.5·high)·(0.2·close)", false},
      {"(0.3·open)·(0.09·low)^(0.3·high)−(0.1·close)", true},
      {"(0.18·volume)^(0.4·vwap)", true},
      {"(0.1·open)/(0.3·low)", false},
  };
  auto panel = rmtest::random_panel(rng, 3, 5, 6);
  int fixtures_ok = 0;
  for (const auto& row : rows) {
    try {
      bool gated = true;
      if (row.needs_pow) {
        try {
          expr::parse(row.text, pub);
          gated = false;
        } catch (const ParseError& e) {
          gated = e.kind() == ParseErrorKind::kOperatorDisabled;
        }
      }
      expr::ParseOptions opts{row.needs_pow, std::nullopt};
      auto e = expr::parse(row.text, pub, opts);
      auto values = expr::evaluate(e, pub, panel);
      const bool reparsed = expr::parse(expr::serialize(e, pub), pub, opts) == e;
      if (gated && reparsed && values.valid_count() > 0) ++fixtures_ok;
    } catch (const Error&) {
    }
  }
  return {mismatches == 0 && fixtures_ok == 5,
          "10000 round trips, " + std::to_string(mismatches) + " mismatches; " +
              std::to_string(fixtures_ok) + "/5 published formulas parse, evaluate and re-serialize" +
              " (the two with ^ only with pow)"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "metric oracles", 10, metric_oracles},
      {2, "gradient correctness", 60, gradient_check},
      {3, "high-level baseline identity", 0, baseline_identity},
      {4, "grammar safety", 120, grammar_safety},
      {5, "oracle recovery", 900, oracle_recovery},
      {6, "transfer benefit", 0, transfer_benefit},
      {7, "pool monotonicity", 0, pool_monotonicity},
      {8, "backtest correctness", 0, backtest_correctness},
      {9, "round trip and fixtures", 0, round_trip_and_fixtures},
      {10, "determinism", 0, determinism},
  };
  fs::create_directories(kWorkDir);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = seconds_since(start);
    if (c.limit_s > 0 && elapsed >= c.limit_s) {
      o.pass = false;
      o.detail += "; runtime limit " + fmt("%.0f", c.limit_s) + " s exceeded";
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): "
              << o.detail << " [" << fmt("%.1f", elapsed) << " s]" << std::endl;
  }
  fs::remove_all(kWorkDir);
  return failed == 0 ? 0 : 1;
}
