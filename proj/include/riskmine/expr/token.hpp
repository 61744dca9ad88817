#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "riskmine/market/panel.hpp"

namespace riskmine::expr {

// Grammar symbols. The first six are terminals in canonical feature order.
enum class Op : std::uint8_t {
  kOpen, kHigh, kLow, kClose, kVolume, kVwap,
  kAdd, kSub, kMul, kDiv,
  kInv, kSqr, kSqrt, kSin, kCos, kTan, kAtan, kLog, kExp, kAbs,
  kPow,
};

inline constexpr std::size_t kOpCount = 21;

constexpr bool is_terminal(Op op) { return op <= Op::kVwap; }
constexpr bool is_binary(Op op) { return (op >= Op::kAdd && op <= Op::kDiv) || op == Op::kPow; }
constexpr bool is_unary(Op op) { return op >= Op::kInv && op <= Op::kAbs; }
constexpr int arity(Op op) { return is_terminal(op) ? 0 : (is_binary(op) ? 2 : 1); }

constexpr market::Feature feature_of(Op op) { return static_cast<market::Feature>(op); }
constexpr Op terminal(market::Feature f) { return static_cast<Op>(market::index(f)); }

std::string_view name(Op op);
std::optional<Op> op_from_name(std::string_view name);

// Ordered action set of the low-level policy: 6 terminals, 4 binary and 10
// unary operators, plus pow when enabled.
class Vocabulary {
 public:
  explicit Vocabulary(bool enable_pow = false);
  // Arbitrary subset, e.g. a reduced vocabulary for exhaustive checks.
  static Vocabulary of(std::vector<Op> ops);

  std::size_t size() const { return ops_.size(); }
  Op at(std::size_t i) const { return ops_[i]; }
  std::span<const Op> ops() const { return ops_; }
  std::optional<std::size_t> index_of(Op op) const;
  bool contains(Op op) const { return index_of(op).has_value(); }

 private:
  std::vector<Op> ops_;
  std::vector<int> index_;  // Op -> position, -1 when absent
};

}  // namespace riskmine::expr
