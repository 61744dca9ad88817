#include "riskmine/cli/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>

#include "riskmine/error.hpp"
#include "riskmine/expr/formula.hpp"
#include "riskmine/expr/option_catalog.hpp"
#include "riskmine/market/csv.hpp"
#include "riskmine/market/rv.hpp"

namespace riskmine::cli {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Drops a trailing "; comment" or "# comment" preceded by whitespace.
std::string strip_comment(const std::string& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if ((v[i] == ';' || v[i] == '#') && (v[i - 1] == ' ' || v[i - 1] == '\t')) {
      return trim(v.substr(0, i));
    }
  }
  return trim(v);
}

struct Entry {
  std::string section;  // empty for globals
  std::string key;
  std::string value;
};

std::string where(const Entry& e) {
  return e.section.empty() ? "key '" + e.key + "'"
                           : "key '" + e.key + "' in section [" + e.section + "]";
}

[[noreturn]] void bad_value(const Entry& e, const std::string& expected) {
  throw ConfigError(where(e) + ": expected " + expected + ", got '" + e.value + "'");
}

std::uint64_t as_u64(const Entry& e) {
  std::uint64_t v = 0;
  const char* end = e.value.data() + e.value.size();
  auto [p, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || p != end || e.value.empty()) bad_value(e, "a nonnegative integer");
  return v;
}

std::size_t as_size(const Entry& e) { return static_cast<std::size_t>(as_u64(e)); }

double as_double(const Entry& e) {
  double v = 0.0;
  const char* end = e.value.data() + e.value.size();
  auto [p, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || p != end || e.value.empty() || !std::isfinite(v)) {
    bad_value(e, "a finite number");
  }
  return v;
}

bool as_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off") return false;
  bad_value(e, "a boolean");
}

market::Date as_date(const Entry& e) {
  try {
    return market::parse_date(e.value);
  } catch (const Error&) {
    bad_value(e, "a date YYYY-MM-DD");
  }
}

using Setter = std::function<void(RunConfig&, const Entry&)>;
using Schema = std::map<std::string, std::map<std::string, Setter>>;

void set_range_first(std::optional<market::DateRange>& r, market::Date d) {
  if (!r) r = market::DateRange{d, d};
  r->first = d;
}
void set_range_last(std::optional<market::DateRange>& r, market::Date d) {
  if (!r) r = market::DateRange{d, d};
  r->last = d;
}

const Schema& schema() {
  static const Schema s = [] {
    Schema m;
    m[""]["seed"] = [](RunConfig& c, const Entry& e) { c.seed = as_u64(e); };

    auto& data = m["data"];
    data["source"] = [](RunConfig& c, const Entry& e) {
      if (e.value == "synthetic") {
        c.data.source = DataSource::kSynthetic;
      } else if (e.value == "csv") {
        c.data.source = DataSource::kCsv;
      } else {
        bad_value(e, "'synthetic' or 'csv'");
      }
    };
    data["panel"] = [](RunConfig& c, const Entry& e) { c.data.panel = e.value; };
    data["target"] = [](RunConfig& c, const Entry& e) { c.data.target = e.value; };
    data["market_minutes"] = [](RunConfig& c, const Entry& e) {
      c.data.market_minutes = as_size(e);
    };
    data["pretrain_start"] = [](RunConfig& c, const Entry& e) {
      set_range_first(c.data.pretrain, as_date(e));
    };
    data["pretrain_end"] = [](RunConfig& c, const Entry& e) {
      set_range_last(c.data.pretrain, as_date(e));
    };
    data["train_start"] = [](RunConfig& c, const Entry& e) {
      set_range_first(c.data.train, as_date(e));
    };
    data["train_end"] = [](RunConfig& c, const Entry& e) {
      set_range_last(c.data.train, as_date(e));
    };
    data["eval_start"] = [](RunConfig& c, const Entry& e) {
      set_range_first(c.data.eval, as_date(e));
    };
    data["eval_end"] = [](RunConfig& c, const Entry& e) {
      set_range_last(c.data.eval, as_date(e));
    };

    auto& syn = m["data.synthetic"];
    syn["symbols"] = [](RunConfig& c, const Entry& e) { c.synthetic->spec.symbols = as_size(e); };
    syn["days"] = [](RunConfig& c, const Entry& e) { c.synthetic->spec.days = as_size(e); };
    syn["minutes"] = [](RunConfig& c, const Entry& e) { c.synthetic->spec.minutes = as_size(e); };
    syn["seed"] = [](RunConfig& c, const Entry& e) { c.synthetic->spec.seed = as_u64(e); };
    syn["noise_sd"] = [](RunConfig& c, const Entry& e) {
      c.synthetic->spec.noise_sd = as_double(e);
    };
    syn["start"] = [](RunConfig& c, const Entry& e) { c.synthetic->spec.start = as_date(e); };
    syn["planted"] = [](RunConfig& c, const Entry& e) { c.synthetic->planted = e.value; };
    syn["planted_option"] = [](RunConfig& c, const Entry& e) {
      c.synthetic->planted_option = as_size(e);
    };
    syn["recent_option"] = [](RunConfig& c, const Entry& e) {
      c.synthetic->recent_option = as_size(e);
    };

    auto& pol = m["policy"];
    pol["embedding_dim"] = [](RunConfig& c, const Entry& e) {
      c.mining.policy.embedding_dim = as_size(e);
    };
    pol["heads"] = [](RunConfig& c, const Entry& e) { c.mining.policy.heads = as_size(e); };
    pol["hidden_width"] = [](RunConfig& c, const Entry& e) {
      c.mining.policy.hidden_width = as_size(e);
    };
    pol["hidden_layers"] = [](RunConfig& c, const Entry& e) {
      c.mining.policy.hidden_layers = as_size(e);
    };
    pol["value_readout"] = [](RunConfig& c, const Entry& e) {
      c.mining.policy.value_readout = as_bool(e);
    };
    pol["enable_pow"] = [](RunConfig& c, const Entry& e) {
      c.mining.policy.enable_pow = as_bool(e);
    };
    pol["initial_option"] = [](RunConfig& c, const Entry& e) {
      c.mining.policy.initial_option = as_size(e);
    };
    pol["catalog"] = [](RunConfig& c, const Entry& e) {
      if (e.value != "default" && e.value != "published") bad_value(e, "'default' or 'published'");
      c.mining.policy.catalog = e.value;
    };

    auto& tr = m["train"];
    tr["rollout_length"] = [](RunConfig& c, const Entry& e) {
      c.mining.train.rollout_length = as_size(e);
    };
    tr["ppo_epochs"] = [](RunConfig& c, const Entry& e) { c.mining.train.ppo_epochs = as_size(e); };
    tr["clip_epsilon"] = [](RunConfig& c, const Entry& e) {
      c.mining.train.clip_epsilon = as_double(e);
    };
    tr["lr_high"] = [](RunConfig& c, const Entry& e) { c.mining.train.lr_high = as_double(e); };
    tr["lr_low"] = [](RunConfig& c, const Entry& e) { c.mining.train.lr_low = as_double(e); };
    tr["lr_baseline"] = [](RunConfig& c, const Entry& e) {
      c.mining.train.lr_baseline = as_double(e);
    };
    tr["entropy_coef"] = [](RunConfig& c, const Entry& e) {
      c.mining.train.entropy_coef = as_double(e);
    };
    tr["gamma"] = [](RunConfig& c, const Entry& e) { c.mining.train.gamma = as_double(e); };
    tr["max_length"] = [](RunConfig& c, const Entry& e) { c.mining.train.max_length = as_size(e); };
    tr["iterations"] = [](RunConfig& c, const Entry& e) { c.mining.train.iterations = as_size(e); };
    tr["normalize_advantages"] = [](RunConfig& c, const Entry& e) {
      c.mining.train.normalize_advantages = as_bool(e);
    };
    tr["max_grad_norm"] = [](RunConfig& c, const Entry& e) {
      c.mining.train.max_grad_norm = as_double(e);
    };
    tr["target_pool_ic"] = [](RunConfig& c, const Entry& e) {
      c.mining.train.target_pool_ic = as_double(e);
    };
    tr["aggregation"] = [](RunConfig& c, const Entry& e) {
      if (e.value == "mean") {
        c.mining.train.aggregation = expr::Aggregation::kMean;
      } else if (e.value == "last") {
        c.mining.train.aggregation = expr::Aggregation::kLast;
      } else {
        bad_value(e, "'mean' or 'last'");
      }
    };
    tr["max_masked_fraction"] = [](RunConfig& c, const Entry& e) {
      c.mining.train.reward.max_masked_fraction = as_double(e);
    };
    tr["rank_ic_weight"] = [](RunConfig& c, const Entry& e) {
      c.mining.train.reward.rank_ic_weight = as_double(e);
    };

    auto& tf = m["transfer"];
    tf["enabled"] = [](RunConfig& c, const Entry& e) { c.mining.transfer.enabled = as_bool(e); };
    tf["pretrain_iterations"] = [](RunConfig& c, const Entry& e) {
      c.mining.transfer.pretrain_iterations = as_size(e);
    };
    tf["reinit_high"] = [](RunConfig& c, const Entry& e) {
      c.mining.transfer.reinit_high = as_bool(e);
    };

    auto& pool = m["pool"];
    pool["capacity"] = [](RunConfig& c, const Entry& e) { c.mining.pool.capacity = as_size(e); };
    pool["correlation_cap"] = [](RunConfig& c, const Entry& e) {
      c.mining.pool.correlation_cap = as_double(e);
    };

    auto& bt = m["backtest"];
    bt["top_n"] = [](RunConfig& c, const Entry& e) { c.portfolio.top_n = as_size(e); };
    bt["selection"] = [](RunConfig& c, const Entry& e) {
      if (e.value == "lowest_factor") {
        c.portfolio.selection = backtest::Selection::kLowestFactor;
      } else if (e.value == "highest_factor") {
        c.portfolio.selection = backtest::Selection::kHighestFactor;
      } else {
        bad_value(e, "'lowest_factor' or 'highest_factor'");
      }
    };
    bt["cost_bps"] = [](RunConfig& c, const Entry& e) { c.portfolio.cost_bps = as_double(e); };
    return m;
  }();
  return s;
}

Entry parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + text + "' is not of the form section.key=value");
  }
  const std::string path = trim(text.substr(0, eq));
  Entry e;
  e.value = trim(text.substr(eq + 1));
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) {
    e.key = path;
  } else {
    e.section = path.substr(0, dot);
    e.key = path.substr(dot + 1);
  }
  return e;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

hppo::PhaseData window(const hppo::PhaseData& all, const market::DateRange& range) {
  const auto b = market::select_days(all.panel, range);
  return {all.panel.slice_days(b.first, b.last),
          market::RvTarget(all.target.slice_days(b.first, b.last))};
}

hppo::PhaseData synthetic_dataset(const RunConfig& c, std::uint64_t seed_offset,
                                  std::optional<std::size_t> option) {
  auto planted = planted_factor(c);
  if (option) planted.option_id = *option;
  auto spec = c.synthetic->spec;
  spec.seed += seed_offset;
  auto data = market::generate_synthetic(spec, planted,
                                         expr::OptionCatalog::by_name(c.mining.policy.catalog));
  return {std::move(data.panel), std::move(data.target)};
}

hppo::PhaseData csv_dataset(const RunConfig& c) {
  auto ingested = market::ingest_csv(c.data.panel, c.data.market_minutes);
  market::RvTarget target = c.data.target.empty()
                                ? market::compute_rv(ingested.panel)
                                : market::read_target_csv(ingested.panel, c.data.target);
  return {std::move(ingested.panel), std::move(target)};
}

// Dataset the train and eval windows refer to.
hppo::PhaseData primary_dataset(const RunConfig& c) {
  if (c.data.source == DataSource::kCsv) return csv_dataset(c);
  return synthetic_dataset(c, 0, c.synthetic->recent_option);
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::vector<std::string>& overrides,
                           const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  const auto& sch = schema();
  std::vector<Entry> entries;
  std::map<std::string, bool> sections;
  for (const auto& [name, child] : tree) {
    if (child.empty() && !sch.count(name)) {
      entries.push_back({"", name, strip_comment(child.data())});
      continue;
    }
    if (!sch.count(name) || name.empty()) throw ConfigError("unknown section [" + name + "]");
    sections[name] = true;
    for (const auto& [key, leaf] : child) {
      entries.push_back({name, key, strip_comment(leaf.data())});
    }
  }
  for (const auto& text : overrides) {
    Entry e = parse_override(text);
    if (!sch.count(e.section)) throw ConfigError("unknown section [" + e.section + "]");
    if (!e.section.empty()) sections[e.section] = true;
    entries.push_back(std::move(e));
  }

  RunConfig c;
  if (sections.count("data.synthetic")) c.synthetic.emplace();
  if (sections.count("transfer")) c.mining.transfer.enabled = true;
  bool synthetic_seed = false;
  for (const auto& e : entries) {
    const auto& keys = sch.at(e.section);
    auto it = keys.find(e.key);
    if (it == keys.end()) {
      throw ConfigError(e.section.empty() ? "unknown key '" + e.key + "'"
                                          : "unknown key '" + e.key + "' in section [" +
                                                e.section + "]");
    }
    it->second(c, e);
    if (e.section == "data.synthetic" && e.key == "seed") synthetic_seed = true;
  }
  c.mining.seed = c.seed;
  if (c.synthetic && !synthetic_seed) c.synthetic->spec.seed = c.seed;

  if (c.data.source == DataSource::kCsv) {
    if (c.data.panel.empty()) throw ConfigError("key 'panel' in section [data] is required for csv data");
    c.data.panel = resolve(base_dir, c.data.panel);
    c.data.target = resolve(base_dir, c.data.target);
    if (c.data.market_minutes == 0) throw ConfigError("key 'market_minutes' in section [data] must be positive");
  } else if (!c.synthetic) {
    throw ConfigError("synthetic data needs a [data.synthetic] section");
  }
  if (c.mining.transfer.enabled && c.data.source == DataSource::kCsv && !c.data.pretrain) {
    throw ConfigError("transfer runs on csv data need pretrain_start/pretrain_end in [data]");
  }
  if (c.data.pretrain && c.data.train) {
    market::SplitSpec{*c.data.pretrain, *c.data.train, c.data.eval}.validate();
  }
  c.mining.validate();
  c.portfolio.validate();
  const auto catalog = expr::OptionCatalog::by_name(c.mining.policy.catalog);
  if (c.mining.policy.initial_option >= catalog.size()) {
    throw ConfigError("key 'initial_option' in section [policy] is outside the catalog");
  }
  if (c.synthetic) {
    for (auto opt : {c.synthetic->planted_option, c.synthetic->recent_option}) {
      if (opt && *opt >= catalog.size()) {
        throw ConfigError("synthetic option index outside the catalog in section [data.synthetic]");
      }
    }
    try {
      planted_factor(c);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("key 'planted' in section [data.synthetic]: ") + e.what());
    }
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_run_config(in, overrides, path.parent_path());
}

expr::FactorExpr planted_factor(const RunConfig& c) {
  if (!c.synthetic) throw ConfigError("no [data.synthetic] section");
  expr::ParseOptions opts;
  opts.enable_pow = c.mining.policy.enable_pow;
  opts.option_hint = c.synthetic->planted_option;
  auto e = expr::parse(c.synthetic->planted, expr::OptionCatalog::by_name(c.mining.policy.catalog),
                       opts);
  if (c.synthetic->planted_option) e.option_id = *c.synthetic->planted_option;
  return e;
}

LoadedData load_training_data(const RunConfig& c) {
  LoadedData out;
  if (c.data.source == DataSource::kSynthetic) {
    out.recent = primary_dataset(c);
    if (c.data.train) out.recent = window(out.recent, *c.data.train);
    if (c.mining.transfer.enabled) {
      out.historical = synthetic_dataset(c, 1, std::nullopt);
    }
    return out;
  }
  auto all = csv_dataset(c);
  out.recent = c.data.train ? window(all, *c.data.train) : all;
  if (c.mining.transfer.enabled) out.historical = window(all, *c.data.pretrain);
  return out;
}

hppo::PhaseData load_eval_data(const RunConfig& c) {
  auto all = primary_dataset(c);
  if (c.data.eval) return window(all, *c.data.eval);
  if (c.data.train) return window(all, *c.data.train);
  return all;
}

}  // namespace riskmine::cli
