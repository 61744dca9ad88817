#include "riskmine/expr/grammar.hpp"

#include "riskmine/error.hpp"

namespace riskmine::expr {

int open_slots(std::span<const Op> partial) {
  int need = 1;
  for (Op op : partial) {
    if (need <= 0) return -1;
    need += arity(op) - 1;
  }
  return need;
}

bool is_valid(std::span<const Op> tokens, std::size_t max_length) {
  return !tokens.empty() && tokens.size() <= max_length && open_slots(tokens) == 0;
}

void require_valid(const FactorExpr& expr, std::size_t max_length) {
  if (expr.tokens.empty()) throw ContractViolation("factor expression is empty");
  if (expr.tokens.size() > max_length) {
    throw ContractViolation("factor expression has " + std::to_string(expr.tokens.size()) +
                            " tokens, limit is " + std::to_string(max_length));
  }
  const int need = open_slots(expr.tokens);
  if (need > 0) throw ContractViolation("factor expression is incomplete");
  if (need < 0) throw ContractViolation("factor expression has trailing tokens");
}

std::string cache_key(const FactorExpr& expr) {
  std::string key;
  key.reserve(expr.tokens.size() + 2);
  for (Op op : expr.tokens) key.push_back(static_cast<char>('A' + static_cast<int>(op)));
  key.push_back('#');
  key += std::to_string(expr.option_id);
  return key;
}

namespace {

// Appending an op of arity a to a sequence of length `length` with `need`
// open slots leaves need - 1 + a slots, each requiring at least one more
// terminal.
bool completable_after(std::size_t length, int need, int op_arity, std::size_t max_length) {
  const int after = need - 1 + op_arity;
  return length + 1 + static_cast<std::size_t>(after) <= max_length;
}

int check_partial(std::span<const Op> partial, std::size_t max_length) {
  const int need = open_slots(partial);
  if (need <= 0) throw UsageError("partial expression is already complete; nothing can follow");
  if (partial.size() + static_cast<std::size_t>(need) > max_length) {
    throw ContractViolation("partial expression cannot be completed within " +
                            std::to_string(max_length) + " tokens");
  }
  return need;
}

}  // namespace

std::vector<Op> legal_next_tokens(const Vocabulary& vocab, std::span<const Op> partial,
                                  std::size_t max_length) {
  const int need = check_partial(partial, max_length);
  std::vector<Op> legal;
  for (Op op : vocab.ops()) {
    if (completable_after(partial.size(), need, arity(op), max_length)) legal.push_back(op);
  }
  return legal;
}

std::vector<std::uint8_t> legal_mask(const Vocabulary& vocab, std::span<const Op> partial,
                                     std::size_t max_length) {
  const int need = check_partial(partial, max_length);
  std::vector<std::uint8_t> mask(vocab.size(), 0);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    mask[i] = completable_after(partial.size(), need, arity(vocab.at(i)), max_length) ? 1 : 0;
  }
  return mask;
}

}  // namespace riskmine::expr
