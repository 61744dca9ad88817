#include "riskmine/expr/option_catalog.hpp"

#include <algorithm>

#include "riskmine/error.hpp"

namespace riskmine::expr {

OptionCatalog::OptionCatalog(std::vector<WeightVector> options) : options_(std::move(options)) {
  if (options_.empty()) throw ConfigError("option catalog is empty");
  for (const auto& w : options_) {
    for (double x : w) {
      if (!(x > 0.0 && x <= 1.0)) throw ConfigError("option weights must lie in (0, 1]");
    }
  }
  for (std::size_t i = 0; i < options_.size(); ++i) {
    for (std::size_t j = i + 1; j < options_.size(); ++j) {
      if (options_[i] == options_[j]) {
        throw ConfigError("options " + std::to_string(i) + " and " + std::to_string(j) +
                          " are identical");
      }
    }
  }
}

//                      open  high  low   close volume vwap
OptionCatalog OptionCatalog::default_catalog() {
  return OptionCatalog({
      {0.1, 0.3, 0.3, 0.5, 0.1, 0.4},
      {0.2, 0.5, 0.1, 0.1, 0.5, 0.3},
      {0.3, 0.1, 0.5, 0.2, 0.4, 0.1},
      {0.4, 0.2, 0.4, 0.3, 0.2, 0.5},
      {0.5, 0.4, 0.2, 0.4, 0.3, 0.2},
  });
}

OptionCatalog OptionCatalog::published_catalog() {
  return OptionCatalog({
      {0.3, 0.3, 0.09, 0.1, 0.2, 0.5},
      {0.1, 0.2, 0.3, 0.4, 0.18, 0.4},
      {0.2, 0.4, 0.2, 0.3, 0.1, 0.3},
      {0.4, 0.1, 0.4, 0.5, 0.3, 0.2},
      {0.1, 0.5, 0.1, 0.2, 0.4, 0.1},
  });
}

OptionCatalog OptionCatalog::by_name(const std::string& name) {
  if (name == "default") return default_catalog();
  if (name == "published") return published_catalog();
  throw ConfigError("unknown option catalog '" + name + "' (expected default or published)");
}

}  // namespace riskmine::expr
