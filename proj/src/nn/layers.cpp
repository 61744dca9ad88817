#include "riskmine/nn/layers.hpp"

#include <cmath>

#include "riskmine/error.hpp"

namespace riskmine::nn {
namespace {

void glorot(Parameter& w, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(w.shape.rows + w.shape.cols));
  for (double& x : w.value) x = rng.uniform(-a, a);
}

}  // namespace

Mlp::Mlp(ParameterStore& store, const std::string& prefix, std::vector<std::size_t> widths,
         ParamGroup group, Rng& rng)
    : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw ConfigError("an MLP needs input and output widths");
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const std::string tag = prefix + ".layer" + std::to_string(l);
    weights_.push_back(&store.add(tag + ".weight", {widths_[l + 1], widths_[l]}, group));
    biases_.push_back(&store.add(tag + ".bias", {widths_[l + 1], 1}, group));
  }
  reinitialize(rng);
}

void Mlp::reinitialize(Rng& rng) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    glorot(*weights_[l], rng);
    std::fill(biases_[l]->value.begin(), biases_[l]->value.end(), 0.0);
  }
}

Var Mlp::forward(Graph& graph, Var input) const {
  if (input.shape() != Shape{widths_.front(), 1}) {
    throw ShapeError("MLP expects input width " + std::to_string(widths_.front()) + ", got " +
                     std::to_string(input.shape().rows));
  }
  Var h = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = graph.add(graph.matvec(graph.param(*weights_[l]), h), graph.param(*biases_[l]));
    if (l + 1 < weights_.size()) h = graph.tanh(h);
  }
  return h;
}

OptionEmbedding::OptionEmbedding(ParameterStore& store, const std::string& name,
                                 std::size_t options, std::size_t width, Rng& rng) {
  matrix_ = &store.add(name, {options, width}, ParamGroup::kEmbedding);
  glorot(*matrix_, rng);
}

Var option_logits(Graph& graph, Var query, Var keys, std::size_t heads, bool value_readout) {
  Var scores = graph.attention_scores(query, keys, heads);
  if (!value_readout) return scores;
  Var context = graph.matvec_transposed(keys, graph.softmax(scores));
  return graph.attention_scores(graph.add(query, context), keys, heads);
}

}  // namespace riskmine::nn
