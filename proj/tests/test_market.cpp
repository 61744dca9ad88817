#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "riskmine/error.hpp"
#include "riskmine/expr/evaluate.hpp"
#include "riskmine/expr/formula.hpp"
#include "riskmine/market/csv.hpp"
#include "riskmine/market/rv.hpp"
#include "riskmine/market/split.hpp"
#include "riskmine/market/synthetic.hpp"
#include "riskmine/metrics/correlation.hpp"
#include "riskmine/metrics/ic.hpp"
#include "test_support.hpp"

using namespace riskmine;
using namespace riskmine::market;

namespace {

const char* kHeader = "date,minute,symbol,open,high,low,close,volume,vwap\n";

std::string small_csv() {
  std::ostringstream s;
  s << kHeader;
  for (const char* day : {"2024-03-01", "2024-03-04"})
    for (const char* sym : {"AAA", "BBB"})
      for (int m = 0; m < 3; ++m)
        s << day << ',' << m << ',' << sym << ",10,11,9,10.5,100," << 10 + 0.1 * m << '\n';
  return s.str();
}

}  // namespace

TEST(Ingest, WellFormedFileHasFullShape) {
  std::istringstream in(small_csv());
  auto r = ingest_csv(in, 3);
  EXPECT_EQ(r.panel.num_days(), 2u);
  EXPECT_EQ(r.panel.num_symbols(), 2u);
  EXPECT_EQ(r.panel.minutes_per_day(), 3u);
  EXPECT_EQ(r.panel.masked_cells(), 0u);
  EXPECT_EQ(r.diagnostics.rows, 12u);
  EXPECT_EQ(r.diagnostics.invalid_rows, 0u);
  EXPECT_DOUBLE_EQ(r.panel.value(1, 1, 2, Feature::kVwap), 10.2);
}

TEST(Ingest, HighBelowLowIsMaskedAndCounted) {
  std::string text = small_csv();
  const std::string bad = "2024-03-04,1,BBB,10,11,9,10.5,100,10.1";
  const auto pos = text.find(bad);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, bad.size(), "2024-03-04,1,BBB,10,8,9,10.5,100,10.1");
  std::istringstream in(text);
  auto r = ingest_csv(in, 3);
  EXPECT_EQ(r.diagnostics.invalid_rows, 1u);
  EXPECT_EQ(r.panel.masked_cells(), 1u);
  EXPECT_FALSE(r.panel.valid(1, 1, 1));
  EXPECT_TRUE(r.panel.valid(1, 1, 0));
}

TEST(Ingest, MissingVwapColumnIsNamed) {
  std::istringstream in("date,minute,symbol,open,high,low,close,volume\n2024-03-01,0,A,1,1,1,1,1\n");
  try {
    ingest_csv(in, 3);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("vwap"), std::string::npos);
  }
}

TEST(Ingest, MinuteOutOfRangeReportsRow) {
  std::istringstream in(std::string(kHeader) + "2024-03-01,0,A,1,1,1,1,1,1\n2024-03-01,5,A,1,1,1,1,1,1\n");
  try {
    ingest_csv(in, 3);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(Ingest, UnparseableNumberIsFormatError) {
  std::istringstream in(std::string(kHeader) + "2024-03-01,0,A,1,1,x,1,1,1\n");
  EXPECT_THROW(ingest_csv(in, 3), FormatError);
}

TEST(Ingest, AbsentRowsAreMasked) {
  std::istringstream in(std::string(kHeader) + "2024-03-01,0,A,10,11,9,10,5,10\n");
  auto r = ingest_csv(in, 3);
  EXPECT_EQ(r.diagnostics.missing_cells, 2u);
  EXPECT_EQ(r.panel.masked_cells(), 2u);
}

TEST(Ingest, RoundTripIsBitExact) {
  Rng rng(11);
  auto panel = rmtest::random_panel(rng, 3, 4, 5);
  std::stringstream buf;
  write_csv(panel, buf);
  auto back = ingest_csv(buf, 5);
  EXPECT_TRUE(back.panel == panel);
}

TEST(Rv, ConstantPricesGiveZero) {
  auto p = rmtest::constant_panel(3, 2, 4, 42.0);
  auto rv = compute_rv(p);
  for (std::size_t d = 0; d < 2; ++d)
    for (std::size_t s = 0; s < 2; ++s) {
      EXPECT_TRUE(rv.is_valid(d, s));
      EXPECT_EQ(rv.at(d, s), 0.0);
    }
  EXPECT_FALSE(rv.is_valid(2, 0));
  EXPECT_FALSE(rv.is_valid(2, 1));
}

TEST(Rv, MatchesHighPrecisionOracle) {
  auto p = rmtest::constant_panel(2, 1, 3, 100.0);
  const double closes[] = {100.0, 101.0, 100.5};
  for (std::size_t m = 0; m < 3; ++m) {
    const double c = closes[m];
    p.set_bar(1, 0, m, {c, c, c, c, 1.0, c});
  }
  auto rv = compute_rv(p);
  // 40-digit reference: (ln 1.01)^2 + (ln(100.5/101))^2
  EXPECT_NEAR(rv.at(0, 0), 0.0001236383621418579517979635, 1e-18);
}

TEST(Rv, SingleDayIsInsufficient) {
  EXPECT_THROW(compute_rv(rmtest::constant_panel(1, 2, 3, 1.0)), InsufficientDataError);
}

TEST(Rv, NonpositiveCloseIsDomainErrorNamingCell) {
  auto p = rmtest::constant_panel(2, 2, 3, 5.0);
  p.set_bar(1, 1, 2, {5, 5, 0, 0, 1, 5});
  try {
    compute_rv(p);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("SYM1"), std::string::npos) << e.what();
  }
}

TEST(Rv, MaskedNextDayMasksTarget) {
  Rng rng(3);
  auto p = rmtest::random_panel(rng, 3, 2, 4);
  p.mask(2, 1, 0);
  auto rv = compute_rv(p);
  EXPECT_FALSE(rv.is_valid(1, 1));
  EXPECT_TRUE(rv.is_valid(1, 0));
  EXPECT_TRUE(rv.is_valid(0, 1));
}

TEST(RvProperty, DroppingFirstDayDropsFirstRowOnly) {
  Rng rng(5);
  auto p = rmtest::random_panel(rng, 6, 4, 8, 0.02);
  auto full = compute_rv(p);
  auto tail = compute_rv(p.slice_days(1, 5));
  EXPECT_TRUE(tail == RvTarget(full.slice_days(1, 5)));
}

TEST(RvProperty, ScaleInvariance) {
  Rng rng(6);
  auto p = rmtest::random_panel(rng, 4, 5, 10);
  auto base = compute_rv(p);
  // Power-of-two factors scale every price exactly, so the log ratios and the
  // target are bit-identical.
  for (double c : {0.25, 2.0, 1024.0}) {
    Panel scaled(p.days(), p.symbols(), p.minutes_per_day());
    for (std::size_t d = 0; d < p.num_days(); ++d)
      for (std::size_t s = 0; s < p.num_symbols(); ++s)
        for (std::size_t m = 0; m < p.minutes_per_day(); ++m) {
          BarValues b;
          for (std::size_t f = 0; f < kFeatureCount; ++f)
            b[f] = p.value(d, s, m, static_cast<Feature>(f)) * c;
          scaled.set_bar(d, s, m, b);
        }
    EXPECT_TRUE(compute_rv(scaled) == base) << "c = " << c;
  }
  // Other factors round each price, so agreement is to relative 1e-12.
  Panel scaled(p.days(), p.symbols(), p.minutes_per_day());
  for (std::size_t d = 0; d < p.num_days(); ++d)
    for (std::size_t s = 0; s < p.num_symbols(); ++s)
      for (std::size_t m = 0; m < p.minutes_per_day(); ++m) {
        BarValues b;
        for (std::size_t f = 0; f < kFeatureCount; ++f)
          b[f] = p.value(d, s, m, static_cast<Feature>(f)) * 3.7;
        scaled.set_bar(d, s, m, b);
      }
  auto rv = compute_rv(scaled);
  for (std::size_t i = 0; i < rv.values.size(); ++i)
    EXPECT_NEAR(rv.values[i], base.values[i], 1e-12 * std::max(1e-300, base.values[i]) + 1e-20);
}

TEST(Split, ValidatesOrdering) {
  SplitSpec ok{{parse_date("2024-01-01"), parse_date("2024-01-31")},
               {parse_date("2024-02-01"), parse_date("2024-02-28")},
               std::nullopt};
  EXPECT_NO_THROW(ok.validate());
  SplitSpec overlap = ok;
  overlap.train.first = parse_date("2024-01-15");
  EXPECT_THROW(overlap.validate(), ConfigError);
}

TEST(Split, SelectDaysIsInclusive) {
  auto p = rmtest::constant_panel(10, 1, 1, 1.0);
  auto b = select_days(p, {parse_date("2024-01-03"), parse_date("2024-01-05")});
  EXPECT_EQ(b.first, 2u);
  EXPECT_EQ(b.last, 4u);
  EXPECT_THROW(select_days(p, {parse_date("2025-01-01"), parse_date("2025-01-02")}),
               InsufficientDataError);
}

namespace {

expr::FactorExpr planted_add() {
  return expr::parse("((0.5·close)+(0.1·volume))", expr::OptionCatalog::default_catalog());
}

}  // namespace

TEST(Synthetic, NoiselessPlantedFormulaHasUnitDailyIc) {
  const auto catalog = expr::OptionCatalog::default_catalog();
  SyntheticSpec spec;
  spec.symbols = 20;
  spec.days = 15;
  spec.minutes = 10;
  spec.seed = 9;
  auto planted = planted_add();
  auto data = generate_synthetic(spec, planted, catalog);
  auto values = expr::evaluate(planted, catalog, data.panel);
  auto series = metrics::ic_series(values, data.target);
  EXPECT_EQ(series.days.size(), spec.days - 1);  // last day has no next-day target
  for (double ic : series.daily_ic) EXPECT_NEAR(ic, 1.0, 1e-9);
}

TEST(Synthetic, BarsSatisfyInvariantsAndTargetNonnegative) {
  SyntheticSpec spec;
  spec.symbols = 10;
  spec.days = 5;
  spec.minutes = 8;
  spec.noise_sd = 0.5;
  auto data = generate_synthetic(spec, planted_add(), expr::OptionCatalog::default_catalog());
  for (std::size_t d = 0; d < spec.days; ++d)
    for (std::size_t s = 0; s < spec.symbols; ++s) {
      for (std::size_t m = 0; m < spec.minutes; ++m) {
        MinuteBar bar;
        for (std::size_t f = 0; f < kFeatureCount; ++f)
          bar.values[f] = data.panel.value(d, s, m, static_cast<Feature>(f));
        EXPECT_TRUE(bar.satisfies_invariants());
      }
      if (data.target.is_valid(d, s)) EXPECT_GE(data.target.at(d, s), 0.0);
    }
}

TEST(Synthetic, DeterministicForSeed) {
  SyntheticSpec spec;
  spec.symbols = 6;
  spec.days = 4;
  spec.minutes = 5;
  spec.seed = 77;
  spec.noise_sd = 0.3;
  const auto catalog = expr::OptionCatalog::default_catalog();
  auto a = generate_synthetic(spec, planted_add(), catalog);
  auto b = generate_synthetic(spec, planted_add(), catalog);
  EXPECT_TRUE(a.panel == b.panel);
  EXPECT_TRUE(a.target == b.target);
}

TEST(Synthetic, NegativeNoiseIsDomainError) {
  SyntheticSpec spec;
  spec.noise_sd = -1.0;
  EXPECT_THROW(generate_synthetic(spec, planted_add(), expr::OptionCatalog::default_catalog()),
               DomainError);
}

TEST(Synthetic, NoisyPlantedBeatsRandomExpressions) {
  const auto catalog = expr::OptionCatalog::default_catalog();
  SyntheticSpec spec;
  spec.symbols = 50;
  spec.days = 60;
  spec.minutes = 30;
  spec.seed = 4;
  spec.noise_sd = 0.5;
  auto planted = planted_add();
  auto data = generate_synthetic(spec, planted, catalog);
  const double planted_ic =
      metrics::ic_series(expr::evaluate(planted, catalog, data.panel), data.target).ic_star;
  Rng rng(123);
  expr::Vocabulary vocab;
  double sum = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto e = rmtest::random_expression(rng, vocab, catalog.size());
    auto values = expr::evaluate(e, catalog, data.panel);
    try {
      sum += metrics::ic_series(values, data.target).ic_star;
    } catch (const InsufficientDataError&) {
      // undefined correlation counts as 0
    }
  }
  EXPECT_GT(planted_ic, sum / 100.0);
  EXPECT_GT(planted_ic, 0.5);
}
