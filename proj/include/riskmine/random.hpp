#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace riskmine {

// Seeded generator with portable draws. The standard distributions are
// implementation-defined, so uniform/normal are derived from raw engine bits
// to keep runs bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);

  double normal();

  // Independent child stream; used to give each worker its own generator.
  Rng split() { return Rng(engine_() ^ 0x9E3779B97F4A7C15ULL); }

  std::string state() const;
  void set_state(const std::string& text);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace riskmine
