#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "riskmine/market/panel.hpp"

namespace riskmine::expr {

using WeightVector = std::array<double, market::kFeatureCount>;

// The discrete weight sets the high-level policy chooses between. Every
// weight lies in (0, 1] and no two options are identical.
class OptionCatalog {
 public:
  explicit OptionCatalog(std::vector<WeightVector> options);

  // Five options whose per-feature weights are pairwise distinct, so any
  // printed terminal identifies its option.
  static OptionCatalog default_catalog();
  // Five options covering the weights printed in the published top-5 factor
  // table; shares some per-feature weights between options.
  static OptionCatalog published_catalog();
  static OptionCatalog by_name(const std::string& name);

  std::size_t size() const { return options_.size(); }
  const WeightVector& weights(std::size_t option) const { return options_.at(option); }
  double weight(std::size_t option, market::Feature f) const {
    return options_.at(option)[market::index(f)];
  }

  bool operator==(const OptionCatalog& other) const = default;

 private:
  std::vector<WeightVector> options_;
};

}  // namespace riskmine::expr
