#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "riskmine/nn/graph.hpp"
#include "riskmine/random.hpp"

namespace riskmine::nn {

// Index drawn by inverse CDF from probabilities summing to one. Entries with
// probability 0 are never returned.
std::size_t sample_index(std::span<const double> probs, Rng& rng);

// Masked softmax distribution over a logits node.
class CategoricalDist {
 public:
  CategoricalDist(Graph& graph, Var logits, std::vector<std::uint8_t> mask = {});

  const std::vector<double>& probs() const { return probs_; }
  Var log_prob(std::size_t index) const;
  Var entropy() const;

  struct Sample {
    std::size_t index;
    Var log_prob;
  };
  Sample sample(Rng& rng) const;

 private:
  Graph* graph_;
  Var logits_;
  std::vector<std::uint8_t> mask_;
  std::vector<double> probs_;
};

}  // namespace riskmine::nn
