#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "riskmine/market/panel.hpp"

namespace riskmine::market {

struct IngestDiagnostics {
  std::size_t rows = 0;
  std::size_t invalid_rows = 0;   // rows masked for violating MinuteBar invariants
  std::size_t missing_cells = 0;  // (day, symbol, minute) cells with no row at all
};

struct IngestResult {
  Panel panel;
  IngestDiagnostics diagnostics;
};

// Reads a minute-bar CSV with header
//   date,minute,symbol,open,high,low,close,volume,vwap
// (any column order). Days and symbols are sorted ascending.
IngestResult ingest_csv(const std::filesystem::path& path, std::size_t market_minutes);
IngestResult ingest_csv(std::istream& in, std::size_t market_minutes);

// Writes valid cells only, canonical column order, shortest round-trip numbers.
void write_csv(const Panel& panel, std::ostream& out);
void write_csv(const Panel& panel, const std::filesystem::path& path);

// Target file: date,symbol,rv,valid (one row per day x symbol).
void write_target_csv(const Panel& panel, const RvTarget& target, std::ostream& out);
void write_target_csv(const Panel& panel, const RvTarget& target,
                      const std::filesystem::path& path);
// Aligns the file's rows onto the panel's day and symbol axes; absent rows are masked.
RvTarget read_target_csv(const Panel& panel, const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace riskmine::market
