#pragma once

#include <algorithm>
#include <cmath>

#include "riskmine/expr/token.hpp"

namespace riskmine::expr {

// Guards of the protected operators.
inline constexpr double kDivisionGuard = 1e-12;  // div, inv, log, pow base
inline constexpr double kTanPoleGuard = 1e-9;    // |cos x| below this is a pole
inline constexpr double kExpClamp = 50.0;

// Total versions of the operators: `ok` is cleared on a domain violation or a
// non-finite result, and the returned value is then 0.
inline double apply_unary(Op op, double x, bool& ok) {
  double r = 0.0;
  switch (op) {
    case Op::kInv:
      if (std::fabs(x) < kDivisionGuard) { ok = false; return 0.0; }
      r = 1.0 / x;
      break;
    case Op::kSqr: r = x * x; break;
    case Op::kSqrt: r = std::sqrt(std::fabs(x)); break;
    case Op::kSin: r = std::sin(x); break;
    case Op::kCos: r = std::cos(x); break;
    case Op::kTan: {
      const double c = std::cos(x);
      if (std::fabs(c) < kTanPoleGuard) { ok = false; return 0.0; }
      r = std::sin(x) / c;
      break;
    }
    case Op::kAtan: r = std::atan(x); break;
    case Op::kLog:
      if (std::fabs(x) < kDivisionGuard) { ok = false; return 0.0; }
      r = std::log(std::fabs(x));
      break;
    case Op::kExp: r = std::exp(std::clamp(x, -kExpClamp, kExpClamp)); break;
    case Op::kAbs: r = std::fabs(x); break;
    default: ok = false; return 0.0;
  }
  if (!std::isfinite(r)) { ok = false; return 0.0; }
  return r;
}

inline double apply_binary(Op op, double a, double b, bool& ok) {
  double r = 0.0;
  switch (op) {
    case Op::kAdd: r = a + b; break;
    case Op::kSub: r = a - b; break;
    case Op::kMul: r = a * b; break;
    case Op::kDiv:
      if (std::fabs(b) < kDivisionGuard) { ok = false; return 0.0; }
      r = a / b;
      break;
    case Op::kPow: {
      // exp(b * ln|a|) with the log guard on a and the exp clamp on the exponent.
      if (std::fabs(a) < kDivisionGuard) { ok = false; return 0.0; }
      r = std::exp(std::clamp(b * std::log(std::fabs(a)), -kExpClamp, kExpClamp));
      break;
    }
    default: ok = false; return 0.0;
  }
  if (!std::isfinite(r)) { ok = false; return 0.0; }
  return r;
}

}  // namespace riskmine::expr
