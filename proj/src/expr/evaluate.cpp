#include "riskmine/expr/evaluate.hpp"

#include <vector>

#include "riskmine/error.hpp"
#include "riskmine/expr/grammar.hpp"
#include "riskmine/expr/protected_ops.hpp"

namespace riskmine::expr {
namespace {

void check_inputs(const FactorExpr& expr, const OptionCatalog& catalog) {
  require_valid(expr, expr.tokens.size());
  if (expr.option_id >= catalog.size()) {
    throw ContractViolation("option " + std::to_string(expr.option_id) + " not in catalog of " +
                            std::to_string(catalog.size()));
  }
}

std::size_t max_stack_depth(const std::vector<Op>& tokens) {
  std::size_t depth = 0;
  std::size_t peak = 0;
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    depth = depth + 1 - static_cast<std::size_t>(arity(*it));
    peak = std::max(peak, depth);
  }
  return peak;
}

// Evaluates one (day, symbol) cell over all minutes at once. Tokens are
// consumed right to left, so the stack top is always the left operand.
class CellKernel {
 public:
  CellKernel(const FactorExpr& expr, const WeightVector& weights, std::size_t minutes)
      : expr_(expr), weights_(weights), minutes_(minutes) {
    const std::size_t depth = max_stack_depth(expr.tokens);
    values_.resize(depth * minutes);
    ok_.resize(depth * minutes);
  }

  // Returns false if any minute is invalid.
  bool run(const market::Panel& panel, std::size_t d, std::size_t s, Aggregation agg,
           double& out) {
    const auto valid = panel.validity(d, s);
    std::size_t top = 0;  // number of stack slots in use
    for (auto it = expr_.tokens.rbegin(); it != expr_.tokens.rend(); ++it) {
      const Op op = *it;
      if (is_terminal(op)) {
        const auto series = panel.series(d, s, feature_of(op));
        const double w = weights_[static_cast<std::size_t>(op)];
        double* v = slot(top);
        unsigned char* ok = okslot(top);
        for (std::size_t m = 0; m < minutes_; ++m) {
          v[m] = w * series[m];
          ok[m] = valid[m];
        }
        ++top;
      } else if (arity(op) == 1) {
        double* v = slot(top - 1);
        unsigned char* ok = okslot(top - 1);
        for (std::size_t m = 0; m < minutes_; ++m) {
          if (!ok[m]) continue;
          bool good = true;
          v[m] = apply_unary(op, v[m], good);
          ok[m] = good;
        }
      } else {
        const double* lhs = slot(top - 1);
        const unsigned char* lok = okslot(top - 1);
        double* rhs = slot(top - 2);
        unsigned char* rok = okslot(top - 2);
        for (std::size_t m = 0; m < minutes_; ++m) {
          if (!(lok[m] && rok[m])) {
            rok[m] = 0;
            continue;
          }
          bool good = true;
          rhs[m] = apply_binary(op, lhs[m], rhs[m], good);
          rok[m] = good;
        }
        --top;
      }
    }
    const double* v = slot(0);
    const unsigned char* ok = okslot(0);
    if (agg == Aggregation::kLast) {
      if (!ok[minutes_ - 1]) return false;
      out = v[minutes_ - 1];
      return true;
    }
    double sum = 0.0;
    for (std::size_t m = 0; m < minutes_; ++m) {
      if (!ok[m]) return false;
      sum += v[m];
    }
    out = sum / static_cast<double>(minutes_);
    return std::isfinite(out);
  }

 private:
  double* slot(std::size_t i) { return values_.data() + i * minutes_; }
  unsigned char* okslot(std::size_t i) { return ok_.data() + i * minutes_; }

  const FactorExpr& expr_;
  const WeightVector& weights_;
  std::size_t minutes_;
  std::vector<double> values_;
  std::vector<unsigned char> ok_;
};

FactorValues evaluate_kernel(const FactorExpr& expr, const OptionCatalog& catalog,
                             const market::Panel& panel, Aggregation aggregation,
                             bool parallel) {
  check_inputs(expr, catalog);
  FactorValues out(panel.num_days(), panel.num_symbols());
  const auto& weights = catalog.weights(expr.option_id);
  const long long cells = static_cast<long long>(panel.num_days() * panel.num_symbols());
  const std::size_t symbols = panel.num_symbols();

#pragma omp parallel if (parallel)
  {
    CellKernel kernel(expr, weights, panel.minutes_per_day());
#pragma omp for schedule(static)
    for (long long c = 0; c < cells; ++c) {
      const std::size_t d = static_cast<std::size_t>(c) / symbols;
      const std::size_t s = static_cast<std::size_t>(c) % symbols;
      double value = 0.0;
      if (kernel.run(panel, d, s, aggregation, value)) out.set(d, s, value);
    }
  }
  return out;
}

// --- reference path ----------------------------------------------------------

struct ScalarResult {
  double value;
  bool ok;
};

ScalarResult eval_at(const std::vector<Op>& tokens, std::size_t& pos, const WeightVector& w,
                     const market::Panel& panel, std::size_t d, std::size_t s, std::size_t m) {
  const Op op = tokens[pos++];
  if (is_terminal(op)) {
    return {w[static_cast<std::size_t>(op)] * panel.value(d, s, m, feature_of(op)), true};
  }
  if (arity(op) == 1) {
    const ScalarResult x = eval_at(tokens, pos, w, panel, d, s, m);
    if (!x.ok) return {0.0, false};
    bool good = true;
    const double r = apply_unary(op, x.value, good);
    return {r, good};
  }
  const ScalarResult a = eval_at(tokens, pos, w, panel, d, s, m);
  const ScalarResult b = eval_at(tokens, pos, w, panel, d, s, m);
  if (!a.ok || !b.ok) return {0.0, false};
  bool good = true;
  const double r = apply_binary(op, a.value, b.value, good);
  return {r, good};
}

}  // namespace

FactorValues evaluate(const FactorExpr& expr, const OptionCatalog& catalog,
                      const market::Panel& panel, Aggregation aggregation) {
  return evaluate_kernel(expr, catalog, panel, aggregation, true);
}

FactorValues evaluate_sequential(const FactorExpr& expr, const OptionCatalog& catalog,
                                 const market::Panel& panel, Aggregation aggregation) {
  return evaluate_kernel(expr, catalog, panel, aggregation, false);
}

FactorValues evaluate_reference(const FactorExpr& expr, const OptionCatalog& catalog,
                                const market::Panel& panel, Aggregation aggregation) {
  check_inputs(expr, catalog);
  FactorValues out(panel.num_days(), panel.num_symbols());
  const auto& w = catalog.weights(expr.option_id);
  const std::size_t minutes = panel.minutes_per_day();
  for (std::size_t d = 0; d < panel.num_days(); ++d) {
    for (std::size_t s = 0; s < panel.num_symbols(); ++s) {
      const std::size_t first = aggregation == Aggregation::kLast ? minutes - 1 : 0;
      double sum = 0.0;
      bool ok = true;
      for (std::size_t m = first; m < minutes && ok; ++m) {
        if (!panel.valid(d, s, m)) {
          ok = false;
          break;
        }
        std::size_t pos = 0;
        const ScalarResult r = eval_at(expr.tokens, pos, w, panel, d, s, m);
        ok = r.ok;
        sum += r.value;
      }
      if (!ok) continue;
      const double value =
          aggregation == Aggregation::kLast ? sum : sum / static_cast<double>(minutes);
      if (std::isfinite(value)) out.set(d, s, value);
    }
  }
  return out;
}

}  // namespace riskmine::expr
