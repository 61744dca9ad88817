#include "riskmine/cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <omp.h>

#include "riskmine/backtest/backtest.hpp"
#include "riskmine/error.hpp"
#include "riskmine/expr/evaluate.hpp"
#include "riskmine/expr/formula.hpp"
#include "riskmine/expr/option_catalog.hpp"
#include "riskmine/hppo/trainer.hpp"
#include "riskmine/market/csv.hpp"
#include "riskmine/metrics/ic.hpp"
#include "riskmine/metrics/pool.hpp"

namespace riskmine::cli {
namespace fs = std::filesystem;

namespace {

void prepare_outputs(const CommandOptions& options, std::initializer_list<fs::path> files) {
  fs::create_directories(options.out_dir);
  if (options.force) return;
  for (const auto& f : files) {
    if (fs::exists(f)) {
      throw UsageError("refusing to overwrite " + f.string() + " (use --force)");
    }
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? market::format_number(*v) : std::string("NA");
}

}  // namespace

void cmd_synth(const RunConfig& config, const CommandOptions& options, std::ostream& out) {
  if (!config.synthetic) throw ConfigError("synth needs a [data.synthetic] section");
  const fs::path panel_path = options.out_dir / "panel.csv";
  const fs::path target_path = options.out_dir / "target.csv";
  prepare_outputs(options, {panel_path, target_path});

  auto planted = planted_factor(config);
  if (config.synthetic->recent_option) planted.option_id = *config.synthetic->recent_option;
  const auto catalog = expr::OptionCatalog::by_name(config.mining.policy.catalog);
  auto data = market::generate_synthetic(config.synthetic->spec, planted, catalog);
  {
    auto f = open_out(panel_path);
    market::write_csv(data.panel, f);
  }
  {
    auto f = open_out(target_path);
    market::write_target_csv(data.panel, data.target, f);
  }
  auto values = expr::evaluate(planted, catalog, data.panel, config.mining.train.aggregation);
  auto series = metrics::ic_series(values, data.target);
  out << "planted: " << expr::serialize(planted, catalog) << " (option " << planted.option_id
      << ")\n"
      << "ic_star: " << market::format_number(series.ic_star) << '\n'
      << "wrote " << panel_path.string() << " and " << target_path.string() << '\n';
}

void cmd_mine(const RunConfig& config, const CommandOptions& options, std::ostream& out) {
  const fs::path ckpt = options.out_dir / "checkpoint.bin";
  const fs::path pool_path = options.out_dir / "pool.tsv";
  const fs::path log_path = options.out_dir / "iterations.csv";
  prepare_outputs(options, {ckpt, pool_path, log_path});

  auto data = load_training_data(config);
  auto log = open_out(log_path);
  log << hppo::iteration_log_header() << '\n';
  auto hook = [&](const hppo::IterationStats& s) {
    log << hppo::iteration_log_row(s) << '\n';
    log.flush();
    if (s.iteration % 10 == 0) {
      out << s.phase << " iteration " << s.iteration << ": mean reward "
          << market::format_number(s.mean_reward) << ", pool best IC* "
          << market::format_number(s.pool_best_ic) << '\n';
    }
    return false;
  };
  auto result = hppo::mine(std::move(data.historical), std::move(data.recent), config.mining, hook);
  hppo::save_model(result, ckpt);
  metrics::write_pool_file(result.pool,
                           expr::OptionCatalog::by_name(config.mining.policy.catalog), pool_path);
  out << "pool: " << result.pool.size() << " factors, best IC* "
      << market::format_number(result.pool.best_score()) << '\n';
}

std::vector<expr::FactorExpr> load_pool(const RunConfig& config, const fs::path& pool_file) {
  const auto catalog = expr::OptionCatalog::by_name(config.mining.policy.catalog);
  std::vector<expr::FactorExpr> out;
  for (const auto& rec : metrics::read_pool_file(pool_file)) {
    if (rec.option >= catalog.size()) {
      throw FormatError(pool_file.string() + ": option " + std::to_string(rec.option) +
                        " outside the catalog");
    }
    expr::ParseOptions opts;
    opts.enable_pow = config.mining.policy.enable_pow;
    opts.option_hint = rec.option;
    auto e = expr::parse(rec.formula, catalog, opts);
    e.option_id = rec.option;
    out.push_back(std::move(e));
  }
  return out;
}

void cmd_eval(const RunConfig& config, const fs::path& pool_file, const CommandOptions& options,
              std::ostream& out) {
  const fs::path report = options.out_dir / "eval.csv";
  prepare_outputs(options, {report});
  auto pool = load_pool(config, pool_file);
  if (pool.empty()) throw DataError("pool file " + pool_file.string() + " has no factors");
  auto data = load_eval_data(config);
  const auto catalog = expr::OptionCatalog::by_name(config.mining.policy.catalog);

  struct Row {
    std::string formula;
    std::size_t option;
    std::optional<metrics::IcSeries> series;
  };
  std::vector<Row> rows;
  for (const auto& e : pool) {
    auto values = expr::evaluate(e, catalog, data.panel, config.mining.train.aggregation);
    Row r{expr::serialize(e, catalog), e.option_id, std::nullopt};
    try {
      r.series = metrics::ic_series(values, data.target);
    } catch (const InsufficientDataError&) {
    }
    rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (!a.series || !b.series) return a.series.has_value() && !b.series.has_value();
    return a.series->ic_star > b.series->ic_star;
  });
  auto f = open_out(report);
  f << "formula,option,ic_star,ic_std,rank_ic_star,rank_ic_std,ir_star,days\n";
  using market::format_number;
  for (const auto& r : rows) {
    f << '"' << r.formula << "\"," << r.option << ',';
    if (r.series) {
      f << format_number(r.series->ic_star) << ',' << format_number(r.series->ic_std) << ','
        << format_number(r.series->rank_ic_star) << ',' << format_number(r.series->rank_ic_std)
        << ',' << format_optional(r.series->ir_star) << ',' << r.series->days.size() << '\n';
    } else {
      f << "NA,NA,NA,NA,NA,0\n";
    }
  }
  out << "wrote " << report.string() << " (" << rows.size() << " factors)\n";
}

void cmd_backtest(const RunConfig& config, const fs::path& pool_file,
                  const CommandOptions& options, std::ostream& out) {
  const fs::path summary_path = options.out_dir / "backtest_summary.txt";
  auto pool = load_pool(config, pool_file);
  if (pool.empty()) throw DataError("pool file " + pool_file.string() + " has no factors");
  std::vector<fs::path> paths;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    paths.push_back(options.out_dir / ("backtest_" + std::to_string(i + 1) + ".csv"));
  }
  prepare_outputs(options, {summary_path});
  for (const auto& p : paths) prepare_outputs(options, {p});

  auto data = load_eval_data(config);
  const auto catalog = expr::OptionCatalog::by_name(config.mining.policy.catalog);
  auto portfolio = config.portfolio;
  portfolio.aggregation = config.mining.train.aggregation;
  auto summary = open_out(summary_path);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const std::string formula = expr::serialize(pool[i], catalog);
    backtest::BacktestResult result;
    try {
      result = backtest::run_backtest(pool[i], catalog, data.panel, portfolio);
    } catch (const DataError& e) {
      throw BacktestError("factor " + std::to_string(i + 1) + " " + formula + ": " + e.what());
    }
    auto f = open_out(paths[i]);
    backtest::write_result_csv(result, f);
    summary << "[factor " << (i + 1) << "]\nformula: " << formula
            << "\noption: " << pool[i].option_id << '\n';
    backtest::write_summary(result, summary);
    for (const auto& d : result.diagnostics) summary << "note: " << d << '\n';
    summary << '\n';
    out << "factor " << (i + 1) << ": total return "
        << market::format_number(result.summary.total_return) << '\n';
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intraday risk-factor mining with hierarchical PPO"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool force = false;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  std::string pool_file;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Run configuration (INI)")->required();
    sub->add_option("--seed", seed, "Override the global seed");
    sub->add_option("--threads", threads, "Cap on worker threads (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--force", force, "Overwrite existing output files");
    sub->add_option("--set", overrides, "Override a key: section.key=value (repeatable)");
    sub->add_option("-o,--out", out_dir, "Output directory");
  };
  auto* synth = app.add_subcommand("synth", "Generate a synthetic panel and planted target");
  auto* mine = app.add_subcommand("mine", "Train the policies and write the factor pool");
  auto* eval = app.add_subcommand("eval", "Report IC*, RankIC* and IR* of a pool file");
  auto* bt = app.add_subcommand("backtest", "Backtest every factor of a pool file");
  for (auto* sub : {synth, mine, eval, bt}) add_common(sub);
  for (auto* sub : {eval, bt}) {
    sub->add_option("-p,--pool", pool_file, "Pool file written by mine")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);
    auto ov = overrides;
    if (seed) ov.push_back("seed=" + std::to_string(*seed));
    RunConfig config = load_run_config(config_path, ov);
    CommandOptions options{out_dir, force};
    if (synth->parsed()) cmd_synth(config, options, out);
    if (mine->parsed()) cmd_mine(config, options, out);
    if (eval->parsed()) cmd_eval(config, pool_file, options, out);
    if (bt->parsed()) cmd_backtest(config, pool_file, options, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const ShapeError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const TrainingError& e) {
    err << "training error: " << e.what() << '\n';
    return 3;
  } catch (const ContractViolation& e) {
    err << "training error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace riskmine::cli
