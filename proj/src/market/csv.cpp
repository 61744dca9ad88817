#include "riskmine/market/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "riskmine/error.hpp"

namespace riskmine::market {
namespace {

constexpr std::array<std::string_view, 9> kColumns = {
    "date", "minute", "symbol", "open", "high", "low", "close", "volume", "vwap"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_field(std::string_view text, std::size_t row, std::string_view column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw FormatError("row " + std::to_string(row) + ": cannot parse " + std::string(column) +
                      " value '" + std::string(text) + "'");
  }
  return value;
}

struct Row {
  std::string date;
  std::string symbol;
  std::size_t minute;
  BarValues values;
  bool ok;
};

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

IngestResult ingest_csv(std::istream& in, std::size_t market_minutes) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty file: missing header");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM

  std::array<std::size_t, kColumns.size()> pos{};
  {
    std::vector<std::string> header;
    for (auto f : split(line)) {
      std::string name(f);
      std::transform(name.begin(), name.end(), name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      header.push_back(name);
    }
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      auto it = std::find(header.begin(), header.end(), kColumns[c]);
      if (it == header.end()) {
        throw FormatError("missing header column '" + std::string(kColumns[c]) + "'");
      }
      pos[c] = static_cast<std::size_t>(it - header.begin());
    }
  }

  std::vector<Row> rows;
  std::size_t row_number = 1;
  IngestDiagnostics diag;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    const std::size_t needed = *std::max_element(pos.begin(), pos.end()) + 1;
    if (fields.size() < needed) {
      throw FormatError("row " + std::to_string(row_number) + ": expected at least " +
                        std::to_string(needed) + " fields");
    }
    Row row;
    row.date = std::string(fields[pos[0]]);
    Date day;
    try {
      day = parse_date(row.date);
    } catch (const FormatError& e) {
      throw FormatError("row " + std::to_string(row_number) + ": " + e.what());
    }
    const auto minute = parse_field<long long>(fields[pos[1]], row_number, "minute");
    if (minute < 0 || static_cast<std::size_t>(minute) >= market_minutes) {
      throw FormatError("row " + std::to_string(row_number) + ": minute " +
                        std::to_string(minute) + " outside [0, " + std::to_string(market_minutes) +
                        ")");
    }
    row.minute = static_cast<std::size_t>(minute);
    row.symbol = std::string(fields[pos[2]]);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      row.values[f] = parse_field<double>(fields[pos[3 + f]], row_number, kColumns[3 + f]);
    }
    MinuteBar bar{row.symbol, day, row.minute, row.values};
    row.ok = bar.satisfies_invariants();
    if (!row.ok) ++diag.invalid_rows;
    rows.push_back(std::move(row));
  }
  diag.rows = rows.size();

  std::set<std::string> date_set;
  std::set<std::string> symbol_set;
  for (const auto& r : rows) {
    date_set.insert(r.date);
    symbol_set.insert(r.symbol);
  }
  std::vector<Date> days;
  std::map<std::string, std::size_t> day_index;
  for (const auto& d : date_set) {
    day_index[d] = days.size();
    days.push_back(parse_date(d));
  }
  std::vector<std::string> symbols(symbol_set.begin(), symbol_set.end());
  std::unordered_map<std::string, std::size_t> symbol_index;
  for (std::size_t i = 0; i < symbols.size(); ++i) symbol_index[symbols[i]] = i;

  Panel panel(std::move(days), std::move(symbols), market_minutes);
  std::vector<std::uint8_t> seen(panel.num_days() * panel.num_symbols() * market_minutes, 0);
  for (const auto& r : rows) {
    const std::size_t d = day_index[r.date];
    const std::size_t s = symbol_index[r.symbol];
    auto& flag = seen[(d * panel.num_symbols() + s) * market_minutes + r.minute];
    if (flag) {
      throw FormatError("duplicate row for " + r.date + " " + r.symbol + " minute " +
                        std::to_string(r.minute));
    }
    flag = 1;
    if (r.ok) panel.set_bar(d, s, r.minute, r.values);
  }
  diag.missing_cells = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 0));
  return {std::move(panel), diag};
}

IngestResult ingest_csv(const std::filesystem::path& path, std::size_t market_minutes) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return ingest_csv(in, market_minutes);
}

void write_csv(const Panel& panel, std::ostream& out) {
  out << "date,minute,symbol,open,high,low,close,volume,vwap\n";
  for (std::size_t d = 0; d < panel.num_days(); ++d) {
    const std::string date = format_date(panel.days()[d]);
    for (std::size_t s = 0; s < panel.num_symbols(); ++s) {
      for (std::size_t m = 0; m < panel.minutes_per_day(); ++m) {
        if (!panel.valid(d, s, m)) continue;
        out << date << ',' << m << ',' << panel.symbols()[s];
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
          out << ',' << format_number(panel.value(d, s, m, static_cast<Feature>(f)));
        }
        out << '\n';
      }
    }
  }
}

void write_csv(const Panel& panel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_csv(panel, out);
}

void write_target_csv(const Panel& panel, const RvTarget& target, std::ostream& out) {
  out << "date,symbol,rv,valid\n";
  for (std::size_t d = 0; d < target.days; ++d) {
    const std::string date = format_date(panel.days()[d]);
    for (std::size_t s = 0; s < target.symbols; ++s) {
      out << date << ',' << panel.symbols()[s] << ',';
      if (target.is_valid(d, s)) {
        out << format_number(target.at(d, s)) << ",1\n";
      } else {
        out << ",0\n";
      }
    }
  }
}

void write_target_csv(const Panel& panel, const RvTarget& target,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_target_csv(panel, target, out);
}

RvTarget read_target_csv(const Panel& panel, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");
  const auto header = split(line);
  std::array<std::size_t, 4> pos{};
  const std::array<std::string_view, 4> names = {"date", "symbol", "rv", "valid"};
  for (std::size_t c = 0; c < names.size(); ++c) {
    auto it = std::find(header.begin(), header.end(), names[c]);
    if (it == header.end()) {
      throw FormatError("missing header column '" + std::string(names[c]) + "'");
    }
    pos[c] = static_cast<std::size_t>(it - header.begin());
  }
  std::map<std::string, std::size_t> day_index;
  for (std::size_t d = 0; d < panel.num_days(); ++d) day_index[format_date(panel.days()[d])] = d;
  std::unordered_map<std::string, std::size_t> symbol_index;
  for (std::size_t s = 0; s < panel.num_symbols(); ++s) symbol_index[panel.symbols()[s]] = s;

  RvTarget target(panel.num_days(), panel.num_symbols());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() < 4) throw FormatError("row " + std::to_string(row) + ": expected 4 fields");
    auto d = day_index.find(std::string(fields[pos[0]]));
    auto s = symbol_index.find(std::string(fields[pos[1]]));
    if (d == day_index.end() || s == symbol_index.end()) continue;
    if (parse_field<int>(fields[pos[3]], row, "valid") == 0) continue;
    const double rv = parse_field<double>(fields[pos[2]], row, "rv");
    if (!(rv >= 0.0)) throw DomainError("row " + std::to_string(row) + ": negative rv");
    target.set(d->second, s->second, rv);
  }
  return target;
}

}  // namespace riskmine::market
