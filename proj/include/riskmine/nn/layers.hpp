#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "riskmine/nn/graph.hpp"
#include "riskmine/nn/parameter.hpp"
#include "riskmine/random.hpp"

namespace riskmine::nn {

// Affine layers with tanh between them and a linear output layer. Weights
// start uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)); biases at 0.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParameterStore& store, const std::string& prefix, std::vector<std::size_t> widths,
      ParamGroup group, Rng& rng);

  Var forward(Graph& graph, Var input) const;

  std::size_t input_width() const { return widths_.front(); }
  std::size_t output_width() const { return widths_.back(); }
  // Redraws every weight from `rng` and zeroes the biases.
  void reinitialize(Rng& rng);

 private:
  std::vector<std::size_t> widths_;
  std::vector<Parameter*> weights_;
  std::vector<Parameter*> biases_;
};

// W_C: one learned d-dimensional row per option. The same matrix supplies
// the option embeddings and the attention keys and values.
class OptionEmbedding {
 public:
  OptionEmbedding() = default;
  OptionEmbedding(ParameterStore& store, const std::string& name, std::size_t options,
                  std::size_t width, Rng& rng);

  std::size_t options() const { return matrix_->shape.rows; }
  std::size_t width() const { return matrix_->shape.cols; }
  Parameter& matrix() { return *matrix_; }
  const Parameter& matrix() const { return *matrix_; }

  Var node(Graph& graph) const { return graph.param(*matrix_); }

 private:
  Parameter* matrix_ = nullptr;
};

// Option logits from a query: plain scaled dot-product scores, or with
// `value_readout` the scores of (query + attention-weighted value rows).
Var option_logits(Graph& graph, Var query, Var keys, std::size_t heads, bool value_readout);

}  // namespace riskmine::nn
