#include "riskmine/random.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "riskmine/error.hpp"

namespace riskmine {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ContractViolation("Rng::below: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::string Rng::state() const {
  std::ostringstream out;
  out << engine_ << ' ' << (has_spare_ ? 1 : 0) << ' ';
  out.precision(17);
  out << std::hexfloat << spare_;
  return out.str();
}

void Rng::set_state(const std::string& text) {
  std::istringstream in(text);
  int spare_flag = 0;
  std::string spare_text;
  in >> engine_ >> spare_flag >> spare_text;
  if (!in) throw FormatError("malformed RNG state");
  has_spare_ = spare_flag != 0;
  spare_ = std::strtod(spare_text.c_str(), nullptr);
}

}  // namespace riskmine
