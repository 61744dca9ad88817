#include "riskmine/expr/formula.hpp"

#include <cctype>
#include <charconv>
#include <vector>

#include "riskmine/error.hpp"
#include "riskmine/expr/grammar.hpp"
#include "riskmine/market/csv.hpp"

namespace riskmine {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kUnknownFeature: return "unknown feature";
    case ParseErrorKind::kUnbalancedParentheses: return "unbalanced parentheses";
    case ParseErrorKind::kWeightNotInCatalog: return "weight not in catalog";
    case ParseErrorKind::kArityViolation: return "arity violation";
    case ParseErrorKind::kAmbiguousOption: return "ambiguous option";
    case ParseErrorKind::kUnexpectedCharacter: return "unexpected character";
    case ParseErrorKind::kUnexpectedEnd: return "unexpected end of input";
    case ParseErrorKind::kOperatorDisabled: return "operator disabled";
  }
  return "parse error";
}

namespace expr {
namespace {

constexpr std::string_view kMiddleDot = "\xC2\xB7";
constexpr std::string_view kUnicodeMinus = "\xE2\x88\x92";

std::string_view infix_symbol(Op op) {
  switch (op) {
    case Op::kAdd: return "+";
    case Op::kSub: return "-";
    case Op::kMul: return kMiddleDot;
    case Op::kDiv: return "/";
    case Op::kPow: return "^";
    default: return "?";
  }
}

void serialize_at(const FactorExpr& e, const WeightVector& w, std::size_t& pos,
                  std::string& out) {
  const Op op = e.tokens[pos++];
  if (is_terminal(op)) {
    out += '(';
    out += market::format_number(w[static_cast<std::size_t>(op)]);
    out += kMiddleDot;
    out += name(op);
    out += ')';
  } else if (arity(op) == 1) {
    out += name(op);
    out += '(';
    serialize_at(e, w, pos, out);
    out += ')';
  } else {
    out += '(';
    serialize_at(e, w, pos, out);
    out += infix_symbol(op);
    serialize_at(e, w, pos, out);
    out += ')';
  }
}

struct PrintedWeight {
  market::Feature feature;
  double weight;
  std::size_t position;
};

class Parser {
 public:
  Parser(std::string_view text, const OptionCatalog& catalog, const ParseOptions& options)
      : text_(text), catalog_(catalog), options_(options) {}

  FactorExpr run() {
    std::vector<Op> tokens = parse_sum();
    skip_space();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') fail(ParseErrorKind::kUnbalancedParentheses, "unmatched ')'");
      fail(ParseErrorKind::kUnexpectedCharacter, "trailing input");
    }
    return {std::move(tokens), resolve_option()};
  }

 private:
  [[noreturn]] void fail(ParseErrorKind kind, const std::string& detail) const {
    throw ParseError(kind, pos_, detail);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  bool consume(std::string_view s) {
    skip_space();
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  // Operand position: something must follow.
  void expect_operand() {
    if (at_end()) fail(ParseErrorKind::kUnexpectedEnd, "operand expected");
    if (text_[pos_] == ')' || text_[pos_] == ',') {
      fail(ParseErrorKind::kArityViolation, "operator is missing an operand");
    }
  }

  static std::vector<Op> combine(Op op, std::vector<Op> lhs, const std::vector<Op>& rhs) {
    std::vector<Op> out;
    out.reserve(1 + lhs.size() + rhs.size());
    out.push_back(op);
    out.insert(out.end(), lhs.begin(), lhs.end());
    out.insert(out.end(), rhs.begin(), rhs.end());
    return out;
  }

  std::vector<Op> parse_sum() {
    std::vector<Op> lhs = parse_product();
    while (true) {
      Op op;
      if (consume("+")) {
        op = Op::kAdd;
      } else if (consume("-") || consume(kUnicodeMinus)) {
        op = Op::kSub;
      } else {
        return lhs;
      }
      lhs = combine(op, std::move(lhs), parse_product());
    }
  }

  std::vector<Op> parse_product() {
    std::vector<Op> lhs = parse_power();
    while (true) {
      Op op;
      if (consume(kMiddleDot) || consume("*")) {
        op = Op::kMul;
      } else if (consume("/")) {
        op = Op::kDiv;
      } else {
        return lhs;
      }
      lhs = combine(op, std::move(lhs), parse_power());
    }
  }

  std::vector<Op> parse_power() {
    std::vector<Op> base = parse_primary();
    const std::size_t at = (skip_space(), pos_);
    if (consume("^")) {
      if (!options_.enable_pow) {
        pos_ = at;
        fail(ParseErrorKind::kOperatorDisabled, "'^' requires pow to be enabled");
      }
      return combine(Op::kPow, std::move(base), parse_power());
    }
    return base;
  }

  std::vector<Op> parse_primary() {
    expect_operand();
    const char c = text_[pos_];
    if (c == '(') {
      const std::size_t open = pos_;
      ++pos_;
      skip_space();
      if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                  text_[pos_] == '.')) {
        return {parse_terminal()};
      }
      std::vector<Op> inner = parse_sum();
      if (!consume(")")) {
        if (at_end()) {
          throw ParseError(ParseErrorKind::kUnbalancedParentheses, pos_,
                           "'(' at position " + std::to_string(open) + " is never closed");
        }
        fail(ParseErrorKind::kUnexpectedCharacter, "expected ')'");
      }
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      const std::string_view word = read_word();
      const auto op = op_from_name(word);
      if (!op || !is_unary(*op)) {
        pos_ = start;
        if (market::feature_from_name(word)) {
          fail(ParseErrorKind::kUnexpectedCharacter,
               "feature '" + std::string(word) + "' must be written as (weight·name)");
        }
        fail(ParseErrorKind::kUnknownFeature, "unknown name '" + std::string(word) + "'");
      }
      if (!consume("(")) fail(ParseErrorKind::kUnexpectedCharacter, "expected '(' after " +
                                                                        std::string(word));
      std::vector<Op> arg = parse_sum();
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        fail(ParseErrorKind::kArityViolation, std::string(word) + " takes one argument");
      }
      if (!consume(")")) {
        if (at_end()) fail(ParseErrorKind::kUnbalancedParentheses, "missing ')'");
        fail(ParseErrorKind::kUnexpectedCharacter, "expected ')'");
      }
      std::vector<Op> out{*op};
      out.insert(out.end(), arg.begin(), arg.end());
      return out;
    }
    fail(ParseErrorKind::kUnexpectedCharacter, std::string("unexpected '") + c + "'");
  }

  std::string_view read_word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  // After '(' : number '·' feature ')'
  Op parse_terminal() {
    const std::size_t weight_pos = pos_;
    double weight = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), weight);
    if (ec != std::errc{}) fail(ParseErrorKind::kUnexpectedCharacter, "malformed weight");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    if (!consume(kMiddleDot) && !consume("*")) {
      if (at_end()) fail(ParseErrorKind::kUnexpectedEnd, "expected '·' after weight");
      fail(ParseErrorKind::kUnexpectedCharacter, "expected '·' after weight");
    }
    skip_space();
    const std::size_t name_pos = pos_;
    const std::string_view word = read_word();
    if (word.empty()) {
      if (at_end()) fail(ParseErrorKind::kUnexpectedEnd, "expected a feature name");
      fail(ParseErrorKind::kUnexpectedCharacter, "expected a feature name");
    }
    const auto feature = market::feature_from_name(word);
    if (!feature) {
      pos_ = name_pos;
      fail(ParseErrorKind::kUnknownFeature, "unknown feature '" + std::string(word) + "'");
    }
    if (!consume(")")) {
      if (at_end()) fail(ParseErrorKind::kUnbalancedParentheses, "missing ')' after feature");
      fail(ParseErrorKind::kUnexpectedCharacter, "expected ')' after feature");
    }
    printed_.push_back({*feature, weight, weight_pos});
    return terminal(*feature);
  }

  std::size_t resolve_option() {
    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < catalog_.size(); ++k) candidates.push_back(k);
    for (const auto& p : printed_) {
      std::vector<std::size_t> kept;
      for (std::size_t k : candidates) {
        if (catalog_.weight(k, p.feature) == p.weight) kept.push_back(k);
      }
      if (kept.empty()) {
        throw ParseError(ParseErrorKind::kWeightNotInCatalog, p.position,
                         "weight " + market::format_number(p.weight) + " for " +
                             std::string(market::kFeatureNames[market::index(p.feature)]) +
                             " matches no option consistent with the preceding terminals");
      }
      candidates = std::move(kept);
    }
    if (options_.option_hint) {
      for (std::size_t k : candidates) {
        if (k == *options_.option_hint) return k;
      }
      throw ParseError(ParseErrorKind::kWeightNotInCatalog, 0,
                       "printed weights do not belong to option " +
                           std::to_string(*options_.option_hint));
    }
    if (candidates.size() > 1) {
      throw ParseError(ParseErrorKind::kAmbiguousOption, 0,
                       std::to_string(candidates.size()) + " options carry every printed weight");
    }
    return candidates.front();
  }

  std::string_view text_;
  const OptionCatalog& catalog_;
  const ParseOptions& options_;
  std::size_t pos_ = 0;
  std::vector<PrintedWeight> printed_;
};

}  // namespace

std::string serialize(const FactorExpr& expr, const OptionCatalog& catalog) {
  require_valid(expr, expr.tokens.size());
  std::string out;
  std::size_t pos = 0;
  serialize_at(expr, catalog.weights(expr.option_id), pos, out);
  return out;
}

FactorExpr parse(std::string_view text, const OptionCatalog& catalog, const ParseOptions& options) {
  return Parser(text, catalog, options).run();
}

}  // namespace expr
}  // namespace riskmine
