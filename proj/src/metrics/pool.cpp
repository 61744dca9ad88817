#include "riskmine/metrics/pool.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "riskmine/error.hpp"
#include "riskmine/expr/formula.hpp"
#include "riskmine/market/csv.hpp"
#include "riskmine/metrics/correlation.hpp"

namespace riskmine::metrics {

FactorPool::FactorPool(std::size_t capacity, double correlation_cap)
    : capacity_(capacity), cap_(correlation_cap) {
  if (capacity_ == 0) throw ConfigError("pool capacity must be at least 1");
  if (!(cap_ > 0.0 && cap_ <= 1.0)) throw ConfigError("correlation_cap must lie in (0, 1]");
}

double factor_correlation(const market::DailyGrid& a, const market::DailyGrid& b) {
  std::vector<std::uint8_t> joint(a.valid.size());
  for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = a.valid[i] && b.valid[i];
  const auto r = try_pearson(a.values, b.values, joint);
  return r ? std::fabs(*r) : 0.0;
}

bool FactorPool::could_admit(double score) const {
  return entries_.size() < capacity_ || score > entries_.back().score;
}

bool FactorPool::contains(const expr::FactorExpr& e) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const PoolEntry& p) { return p.expr == e; });
}

AdmitDecision FactorPool::admit(const expr::FactorExpr& candidate, expr::FactorValues values,
                                IcSeries series) {
  AdmitDecision decision;
  const double score = std::fabs(series.ic_star);
  if (!could_admit(score)) return decision;

  std::vector<std::size_t> conflicts;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (factor_correlation(values, entries_[i].values) > cap_) {
      if (entries_[i].score >= score) return decision;
      conflicts.push_back(i);
    }
  }
  for (auto it = conflicts.rbegin(); it != conflicts.rend(); ++it) {
    decision.evicted.push_back(entries_[*it].expr);
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(*it));
  }
  if (entries_.size() >= capacity_) {
    decision.evicted.push_back(entries_.back().expr);
    entries_.pop_back();
  }
  PoolEntry entry{candidate, std::move(series), score, std::move(values)};
  // Stable position: after every entry with an equal or higher score.
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), score,
                              [](double s, const PoolEntry& e) { return s > e.score; });
  entries_.insert(pos, std::move(entry));
  decision.admitted = true;
  return decision;
}

void write_pool_file(const FactorPool& pool, const expr::OptionCatalog& catalog,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const auto& e : pool.entries()) {
    out << expr::serialize(e.expr, catalog) << '\t' << e.expr.option_id << '\t'
        << market::format_number(e.score) << '\n';
  }
}

std::vector<PoolRecord> read_pool_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<PoolRecord> records;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(row) +
                        ": expected formula<TAB>option<TAB>score");
    }
    PoolRecord r;
    r.formula = line.substr(0, t1);
    const std::string opt = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string score = line.substr(t2 + 1);
    if (std::from_chars(opt.data(), opt.data() + opt.size(), r.option).ec != std::errc{} ||
        std::from_chars(score.data(), score.data() + score.size(), r.score).ec != std::errc{}) {
      throw FormatError(path.string() + ":" + std::to_string(row) + ": malformed option or score");
    }
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace riskmine::metrics
