#include "riskmine/expr/token.hpp"

#include <array>

#include "riskmine/error.hpp"

namespace riskmine::expr {
namespace {

constexpr std::array<std::string_view, kOpCount> kNames = {
    "open", "high", "low", "close", "volume", "vwap",
    "add", "sub", "mul", "div",
    "inv", "sqr", "sqrt", "sin", "cos", "tan", "atan", "log", "exp", "abs",
    "pow"};

}  // namespace

std::string_view name(Op op) { return kNames[static_cast<std::size_t>(op)]; }

std::optional<Op> op_from_name(std::string_view text) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == text) return static_cast<Op>(i);
  }
  return std::nullopt;
}

Vocabulary::Vocabulary(bool enable_pow) {
  const std::size_t n = enable_pow ? kOpCount : kOpCount - 1;
  for (std::size_t i = 0; i < n; ++i) ops_.push_back(static_cast<Op>(i));
  index_.assign(kOpCount, -1);
  for (std::size_t i = 0; i < ops_.size(); ++i) index_[static_cast<std::size_t>(ops_[i])] = static_cast<int>(i);
}

Vocabulary Vocabulary::of(std::vector<Op> ops) {
  Vocabulary v(false);
  v.ops_ = std::move(ops);
  v.index_.assign(kOpCount, -1);
  for (std::size_t i = 0; i < v.ops_.size(); ++i) {
    auto& slot = v.index_[static_cast<std::size_t>(v.ops_[i])];
    if (slot >= 0) throw ContractViolation("Vocabulary::of: duplicate op");
    slot = static_cast<int>(i);
  }
  return v;
}

std::optional<std::size_t> Vocabulary::index_of(Op op) const {
  const int i = index_[static_cast<std::size_t>(op)];
  if (i < 0) return std::nullopt;
  return static_cast<std::size_t>(i);
}

}  // namespace riskmine::expr
