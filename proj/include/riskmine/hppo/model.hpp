#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "riskmine/expr/token.hpp"
#include "riskmine/hppo/config.hpp"
#include "riskmine/market/panel.hpp"
#include "riskmine/nn/graph.hpp"
#include "riskmine/nn/layers.hpp"
#include "riskmine/nn/parameter.hpp"
#include "riskmine/random.hpp"

namespace riskmine::hppo {

// z-scored cross-sectional means of the six features for one day.
using State = std::array<double, market::kFeatureCount>;

// Both policies, the option embedding W_C and the low-level baseline.
//
//   high:     query = MLP([state, W_C[prev]]); logits = attention(query, W_C)
//   low:      logits = MLP([state, W_C[option], token counts, last token])
//   baseline: b_low = MLP([state, W_C[option]])
//
// The high-level baseline is not a network; see baseline_high().
class HppoModel {
 public:
  HppoModel(const PolicyConfig& config, std::size_t num_options, std::size_t max_length,
            std::uint64_t seed);

  const PolicyConfig& config() const { return config_; }
  const expr::Vocabulary& vocab() const { return vocab_; }
  std::size_t num_options() const { return num_options_; }
  std::size_t max_length() const { return max_length_; }

  nn::ParameterStore& params() { return store_; }
  const nn::ParameterStore& params() const { return store_; }

  nn::Var high_logits(nn::Graph& g, const State& state, std::size_t prev_option) const;
  nn::Var low_logits(nn::Graph& g, const State& state, std::size_t option,
                     std::span<const expr::Op> partial) const;
  nn::Var baseline(nn::Graph& g, const State& state, std::size_t option) const;

  // Plain-double conveniences built on the graph functions.
  std::vector<double> option_probs(const State& state, std::size_t prev_option) const;
  std::vector<double> baselines(const State& state) const;  // b_low for every option

  // Fresh draw of the high-level policy weights.
  void reinitialize_high(Rng& rng);

 private:
  nn::Var embedding_row(nn::Graph& g, std::size_t option) const;
  nn::Var state_input(nn::Graph& g, const State& state) const;

  PolicyConfig config_;
  expr::Vocabulary vocab_;
  std::size_t num_options_;
  std::size_t max_length_;
  nn::ParameterStore store_;
  nn::OptionEmbedding embedding_;
  nn::Mlp high_query_;
  nn::Mlp low_policy_;
  nn::Mlp low_baseline_;
};

// b_high(S, Z_prev) = sum_Z pi_theta(Z | S, Z_prev) * b_low(S, Z).
double baseline_high(std::span<const double> option_probs, std::span<const double> b_low);
double baseline_high(const HppoModel& model, const State& state, std::size_t prev_option);

}  // namespace riskmine::hppo
