#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace riskmine::metrics {

// Product-moment correlation over the entries where `valid` is nonzero (all
// entries when `valid` is empty). Throws InsufficientDataError below two
// valid points and DegenerateCorrelationError when either side is constant.
double pearson(std::span<const double> x, std::span<const double> y,
               std::span<const std::uint8_t> valid = {});

// Pearson correlation of average-tie ranks over the valid subset.
double spearman(std::span<const double> x, std::span<const double> y,
                std::span<const std::uint8_t> valid = {});

// Non-throwing forms: empty where pearson/spearman would throw a data error.
std::optional<double> try_pearson(std::span<const double> x, std::span<const double> y,
                                  std::span<const std::uint8_t> valid = {});
std::optional<double> try_spearman(std::span<const double> x, std::span<const double> y,
                                   std::span<const std::uint8_t> valid = {});

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

}  // namespace riskmine::metrics
