#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "riskmine/nn/parameter.hpp"

namespace riskmine::nn {

class Graph;

// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;
  std::span<const double> value() const;
  Shape shape() const;
  double item() const;  // value of a 1x1 node
  std::size_t id() const { return id_; }

 private:
  friend class Graph;
  Var(const Graph* g, std::size_t id) : graph_(g), id_(id) {}
  const Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

// Dynamically recorded computation over dense row-major matrices (vectors
// are n x 1). backward() runs reverse-mode differentiation once, adding
// gradients into the Parameter objects referenced by param() nodes.
class Graph {
 public:
  // One node per parameter and graph; repeated calls return the same node.
  Var param(Parameter& p);
  Var input(std::vector<double> values, Shape shape);
  Var input(std::vector<double> values);  // column vector

  Var matvec(Var m, Var x);             // (r x c)(c x 1)
  Var matvec_transposed(Var m, Var x);  // (r x c)^T (r x 1)
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var tanh(Var a);
  Var exp(Var a);
  Var square(Var a);
  Var clamp(Var a, double lo, double hi);
  Var minimum(Var a, Var b);
  Var concat(std::span<const Var> parts);
  Var slice(Var a, std::size_t begin, std::size_t length);
  Var row(Var m, std::size_t r);  // row r of a matrix as a column vector
  Var element(Var a, std::size_t i);
  Var sum(Var a);
  Var sum(std::span<const Var> scalars);
  Var dot(Var a, Var b);
  Var softmax(Var logits);

  // Scaled dot-product scores of `query` (d) against each row of `keys`
  // (K x d): the d columns are split into `heads` slices and per-head scores
  // q_h . k_h / sqrt(d / heads) are summed.
  Var attention_scores(Var query, Var keys, std::size_t heads);

  // log softmax(logits)[index] over entries with mask != 0 (all if empty).
  Var log_prob(Var logits, std::span<const std::uint8_t> mask, std::size_t index);
  // Entropy of the masked softmax distribution.
  Var entropy(Var logits, std::span<const std::uint8_t> mask);

  void backward(Var loss);
  bool consumed() const { return consumed_; }
  std::size_t size() const { return nodes_.size(); }

  std::span<const double> value(Var v) const { return nodes_[v.id_].value; }
  Shape shape(Var v) const { return nodes_[v.id_].shape; }

 private:
  struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    Parameter* param = nullptr;
    std::function<void(Graph&, std::size_t)> backprop;
  };

  Var push(Shape shape, std::vector<double> value, std::function<void(Graph&, std::size_t)> bp);
  std::vector<double>& grad(std::size_t id) { return nodes_[id].grad; }
  const Node& node(Var v) const { return nodes_[v.id_]; }
  void check_owner(Var v) const;

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
  bool consumed_ = false;
};

// Softmax over mask != 0 entries; masked entries get probability exactly 0.
std::vector<double> masked_softmax(std::span<const double> logits,
                                   std::span<const std::uint8_t> mask = {});

}  // namespace riskmine::nn
