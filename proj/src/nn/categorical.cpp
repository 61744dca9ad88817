#include "riskmine/nn/categorical.hpp"

#include "riskmine/error.hpp"

namespace riskmine::nn {

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = i;
    cum += probs[i];
    if (u < cum) return i;
  }
  if (last == probs.size()) throw ContractViolation("cannot sample from an all-zero distribution");
  return last;  // rounding left u above the final partial sum
}

CategoricalDist::CategoricalDist(Graph& graph, Var logits, std::vector<std::uint8_t> mask)
    : graph_(&graph), logits_(logits), mask_(std::move(mask)) {
  probs_ = masked_softmax(logits.value(), mask_);
}

Var CategoricalDist::log_prob(std::size_t index) const {
  return graph_->log_prob(logits_, mask_, index);
}

Var CategoricalDist::entropy() const { return graph_->entropy(logits_, mask_); }

CategoricalDist::Sample CategoricalDist::sample(Rng& rng) const {
  const std::size_t i = sample_index(probs_, rng);
  return {i, log_prob(i)};
}

}  // namespace riskmine::nn
