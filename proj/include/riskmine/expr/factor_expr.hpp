#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "riskmine/expr/token.hpp"

namespace riskmine::expr {

inline constexpr std::size_t kDefaultMaxLength = 15;

// A factor: a complete prefix-order token sequence plus the option whose
// weights scale its terminals.
struct FactorExpr {
  std::vector<Op> tokens;
  std::size_t option_id = 0;

  bool operator==(const FactorExpr& other) const = default;
};

// Complete, arity-correct, no trailing tokens, within max_length.
bool is_valid(std::span<const Op> tokens, std::size_t max_length = kDefaultMaxLength);
// Throws ContractViolation naming the broken invariant.
void require_valid(const FactorExpr& expr, std::size_t max_length = kDefaultMaxLength);

// Token count of the prefix sequence.
inline std::size_t complexity(const FactorExpr& expr) { return expr.tokens.size(); }

// Compact key for caches and de-duplication: op codes followed by the option.
std::string cache_key(const FactorExpr& expr);

}  // namespace riskmine::expr
