#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "riskmine/expr/factor_expr.hpp"
#include "riskmine/expr/token.hpp"

namespace riskmine::expr {

// Operand slots still open after `partial`: 1 for the empty sequence, 0 once
// the expression is complete, negative if tokens trail a complete tree.
int open_slots(std::span<const Op> partial);

// Tokens t such that partial + t can still be completed within max_length.
// Throws UsageError if partial is already complete and ContractViolation if
// it cannot be completed at all.
std::vector<Op> legal_next_tokens(const Vocabulary& vocab, std::span<const Op> partial,
                                  std::size_t max_length = kDefaultMaxLength);

// Same set as a 0/1 mask aligned with vocab indices.
std::vector<std::uint8_t> legal_mask(const Vocabulary& vocab, std::span<const Op> partial,
                                     std::size_t max_length = kDefaultMaxLength);

}  // namespace riskmine::expr
