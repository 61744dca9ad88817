#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "riskmine/expr/factor_expr.hpp"
#include "riskmine/expr/option_catalog.hpp"

namespace riskmine::expr {

// Fully parenthesised infix text. Terminals print as "(w·name)", binary
// nodes as "(lhs op rhs)" with op in {+, -, ·, /, ^}, unary nodes as
// "name(arg)". Weights use the shortest round-trip decimal form.
std::string serialize(const FactorExpr& expr, const OptionCatalog& catalog);

struct ParseOptions {
  bool enable_pow = false;
  // Resolves the option when several catalog entries carry every printed weight.
  std::optional<std::size_t> option_hint;
};

// Accepts serialize() output and hand-written text in the same syntax with
// usual precedence (^ over ·,/ over +,-; ^ is right associative). '*' is
// accepted for '·' and U+2212 for '-'. Throws ParseError with a byte offset.
FactorExpr parse(std::string_view text, const OptionCatalog& catalog,
                 const ParseOptions& options = {});

}  // namespace riskmine::expr
