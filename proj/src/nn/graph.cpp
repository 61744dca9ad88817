#include "riskmine/nn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskmine/error.hpp"

namespace riskmine::nn {

std::span<const double> Var::value() const { return graph_->value(*this); }
Shape Var::shape() const { return graph_->shape(*this); }
double Var::item() const {
  const auto v = value();
  if (v.size() != 1) throw ShapeError("item() on a non-scalar node");
  return v[0];
}

std::vector<double> masked_softmax(std::span<const double> logits,
                                   std::span<const std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != logits.size()) throw ShapeError("mask size mismatch");
  auto on = [&](std::size_t i) { return mask.empty() || mask[i] != 0; };
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (on(i)) hi = std::max(hi, logits[i]);
  }
  if (!std::isfinite(hi)) throw ContractViolation("categorical distribution has no unmasked entry");
  std::vector<double> p(logits.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!on(i)) continue;
    p[i] = std::exp(logits[i] - hi);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return p;
}

void Graph::check_owner(Var v) const {
  if (v.graph_ != this || v.id_ >= nodes_.size()) throw UsageError("variable from another graph");
}

Var Graph::push(Shape shape, std::vector<double> value,
                std::function<void(Graph&, std::size_t)> bp) {
  if (consumed_) throw UsageError("graph already consumed by backward()");
  nodes_.push_back(Node{shape, std::move(value), {}, nullptr, std::move(bp)});
  return Var(this, nodes_.size() - 1);
}

Var Graph::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var(this, it->second);
  Var v = push(p.shape, p.value, nullptr);
  nodes_[v.id_].param = &p;
  param_nodes_.emplace(&p, v.id_);
  return v;
}

Var Graph::input(std::vector<double> values, Shape shape) {
  if (values.size() != shape.size()) throw ShapeError("input size does not match its shape");
  return push(shape, std::move(values), nullptr);
}

Var Graph::input(std::vector<double> values) {
  const Shape s{values.size(), 1};
  return input(std::move(values), s);
}

Var Graph::matvec(Var m, Var x) {
  check_owner(m);
  check_owner(x);
  const Shape ms = node(m).shape;
  const Shape xs = node(x).shape;
  if (xs.cols != 1 || xs.rows != ms.cols) {
    throw ShapeError("matvec: " + std::to_string(ms.rows) + "x" + std::to_string(ms.cols) +
                     " matrix times " + std::to_string(xs.rows) + "x" + std::to_string(xs.cols));
  }
  const auto& M = node(m).value;
  const auto& X = node(x).value;
  std::vector<double> out(ms.rows, 0.0);
  for (std::size_t r = 0; r < ms.rows; ++r) {
    double acc = 0.0;
    const double* row = M.data() + r * ms.cols;
    for (std::size_t c = 0; c < ms.cols; ++c) acc += row[c] * X[c];
    out[r] = acc;
  }
  const std::size_t mi = m.id_;
  const std::size_t xi = x.id_;
  return push({ms.rows, 1}, std::move(out), [mi, xi, ms](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    const auto& M = g.nodes_[mi].value;
    const auto& X = g.nodes_[xi].value;
    auto& gm = g.grad(mi);
    auto& gx = g.grad(xi);
    for (std::size_t r = 0; r < ms.rows; ++r) {
      const double gr = G[r];
      if (gr == 0.0) continue;
      const double* row = M.data() + r * ms.cols;
      double* grow = gm.data() + r * ms.cols;
      for (std::size_t c = 0; c < ms.cols; ++c) {
        grow[c] += gr * X[c];
        gx[c] += gr * row[c];
      }
    }
  });
}

Var Graph::matvec_transposed(Var m, Var x) {
  check_owner(m);
  check_owner(x);
  const Shape ms = node(m).shape;
  const Shape xs = node(x).shape;
  if (xs.cols != 1 || xs.rows != ms.rows) throw ShapeError("matvec_transposed: shape mismatch");
  const auto& M = node(m).value;
  const auto& X = node(x).value;
  std::vector<double> out(ms.cols, 0.0);
  for (std::size_t r = 0; r < ms.rows; ++r) {
    for (std::size_t c = 0; c < ms.cols; ++c) out[c] += M[r * ms.cols + c] * X[r];
  }
  const std::size_t mi = m.id_;
  const std::size_t xi = x.id_;
  return push({ms.cols, 1}, std::move(out), [mi, xi, ms](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    const auto& M = g.nodes_[mi].value;
    const auto& X = g.nodes_[xi].value;
    auto& gm = g.grad(mi);
    auto& gx = g.grad(xi);
    for (std::size_t r = 0; r < ms.rows; ++r) {
      for (std::size_t c = 0; c < ms.cols; ++c) {
        gm[r * ms.cols + c] += G[c] * X[r];
        gx[r] += G[c] * M[r * ms.cols + c];
      }
    }
  });
}

namespace {

void require_same(Shape a, Shape b, const char* op) {
  if (!(a == b)) throw ShapeError(std::string(op) + ": operand shapes differ");
}

}  // namespace

Var Graph::add(Var a, Var b) {
  check_owner(a);
  check_owner(b);
  require_same(node(a).shape, node(b).shape, "add");
  std::vector<double> out(node(a).value);
  const auto& B = node(b).value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i];
  const std::size_t ai = a.id_;
  const std::size_t bi = b.id_;
  return push(node(a).shape, std::move(out), [ai, bi](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    auto& ga = g.grad(ai);
    for (std::size_t i = 0; i < G.size(); ++i) ga[i] += G[i];
    auto& gb = g.grad(bi);
    for (std::size_t i = 0; i < G.size(); ++i) gb[i] += G[i];
  });
}

Var Graph::sub(Var a, Var b) {
  check_owner(a);
  check_owner(b);
  require_same(node(a).shape, node(b).shape, "sub");
  std::vector<double> out(node(a).value);
  const auto& B = node(b).value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= B[i];
  const std::size_t ai = a.id_;
  const std::size_t bi = b.id_;
  return push(node(a).shape, std::move(out), [ai, bi](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    auto& ga = g.grad(ai);
    for (std::size_t i = 0; i < G.size(); ++i) ga[i] += G[i];
    auto& gb = g.grad(bi);
    for (std::size_t i = 0; i < G.size(); ++i) gb[i] -= G[i];
  });
}

Var Graph::mul(Var a, Var b) {
  check_owner(a);
  check_owner(b);
  require_same(node(a).shape, node(b).shape, "mul");
  std::vector<double> out(node(a).value);
  const auto& B = node(b).value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= B[i];
  const std::size_t ai = a.id_;
  const std::size_t bi = b.id_;
  return push(node(a).shape, std::move(out), [ai, bi](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    const auto& A = g.nodes_[ai].value;
    const auto& B = g.nodes_[bi].value;
    auto& ga = g.grad(ai);
    for (std::size_t i = 0; i < G.size(); ++i) ga[i] += G[i] * B[i];
    auto& gb = g.grad(bi);
    for (std::size_t i = 0; i < G.size(); ++i) gb[i] += G[i] * A[i];
  });
}

Var Graph::scale(Var a, double c) {
  check_owner(a);
  std::vector<double> out(node(a).value);
  for (double& x : out) x *= c;
  const std::size_t ai = a.id_;
  return push(node(a).shape, std::move(out), [ai, c](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    auto& ga = g.grad(ai);
    for (std::size_t i = 0; i < G.size(); ++i) ga[i] += c * G[i];
  });
}

Var Graph::add_scalar(Var a, double c) {
  check_owner(a);
  std::vector<double> out(node(a).value);
  for (double& x : out) x += c;
  const std::size_t ai = a.id_;
  return push(node(a).shape, std::move(out), [ai](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    auto& ga = g.grad(ai);
    for (std::size_t i = 0; i < G.size(); ++i) ga[i] += G[i];
  });
}

Var Graph::tanh(Var a) {
  check_owner(a);
  std::vector<double> out(node(a).value);
  for (double& x : out) x = std::tanh(x);
  const std::size_t ai = a.id_;
  return push(node(a).shape, std::move(out), [ai](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    const auto& Y = g.nodes_[self].value;
    auto& ga = g.grad(ai);
    for (std::size_t i = 0; i < G.size(); ++i) ga[i] += G[i] * (1.0 - Y[i] * Y[i]);
  });
}

Var Graph::exp(Var a) {
  check_owner(a);
  std::vector<double> out(node(a).value);
  for (double& x : out) x = std::exp(x);
  const std::size_t ai = a.id_;
  return push(node(a).shape, std::move(out), [ai](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    const auto& Y = g.nodes_[self].value;
    auto& ga = g.grad(ai);
    for (std::size_t i = 0; i < G.size(); ++i) ga[i] += G[i] * Y[i];
  });
}

Var Graph::square(Var a) {
  check_owner(a);
  std::vector<double> out(node(a).value);
  for (double& x : out) x = x * x;
  const std::size_t ai = a.id_;
  return push(node(a).shape, std::move(out), [ai](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    const auto& A = g.nodes_[ai].value;
    auto& ga = g.grad(ai);
    for (std::size_t i = 0; i < G.size(); ++i) ga[i] += 2.0 * A[i] * G[i];
  });
}

Var Graph::clamp(Var a, double lo, double hi) {
  check_owner(a);
  std::vector<double> out(node(a).value);
  for (double& x : out) x = std::clamp(x, lo, hi);
  const std::size_t ai = a.id_;
  return push(node(a).shape, std::move(out), [ai, lo, hi](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    const auto& A = g.nodes_[ai].value;
    auto& ga = g.grad(ai);
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (A[i] > lo && A[i] < hi) ga[i] += G[i];
    }
  });
}

Var Graph::minimum(Var a, Var b) {
  check_owner(a);
  check_owner(b);
  require_same(node(a).shape, node(b).shape, "minimum");
  std::vector<double> out(node(a).value);
  const auto& B = node(b).value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(out[i], B[i]);
  const std::size_t ai = a.id_;
  const std::size_t bi = b.id_;
  return push(node(a).shape, std::move(out), [ai, bi](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    const auto& A = g.nodes_[ai].value;
    const auto& B = g.nodes_[bi].value;
    auto& ga = g.grad(ai);
    auto& gb = g.grad(bi);
    // Ties route the gradient to the first operand.
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (A[i] <= B[i]) {
        ga[i] += G[i];
      } else {
        gb[i] += G[i];
      }
    }
  });
}

Var Graph::concat(std::span<const Var> parts) {
  std::vector<double> out;
  std::vector<std::size_t> ids;
  std::vector<std::size_t> offsets;
  for (Var p : parts) {
    check_owner(p);
    if (node(p).shape.cols != 1) throw ShapeError("concat expects column vectors");
    offsets.push_back(out.size());
    ids.push_back(p.id_);
    out.insert(out.end(), node(p).value.begin(), node(p).value.end());
  }
  const Shape s{out.size(), 1};
  return push(s, std::move(out), [ids, offsets](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      auto& gp = g.grad(ids[k]);
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += G[offsets[k] + i];
    }
  });
}

Var Graph::slice(Var a, std::size_t begin, std::size_t length) {
  check_owner(a);
  const auto& A = node(a).value;
  if (begin + length > A.size()) throw ShapeError("slice out of range");
  std::vector<double> out(A.begin() + static_cast<std::ptrdiff_t>(begin),
                          A.begin() + static_cast<std::ptrdiff_t>(begin + length));
  const std::size_t ai = a.id_;
  return push({length, 1}, std::move(out), [ai, begin](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    auto& ga = g.grad(ai);
    for (std::size_t i = 0; i < G.size(); ++i) ga[begin + i] += G[i];
  });
}

Var Graph::row(Var m, std::size_t r) {
  check_owner(m);
  const Shape ms = node(m).shape;
  if (r >= ms.rows) throw ShapeError("row index out of range");
  return slice(m, r * ms.cols, ms.cols);
}

Var Graph::element(Var a, std::size_t i) { return slice(a, i, 1); }

Var Graph::sum(Var a) {
  check_owner(a);
  double s = 0.0;
  for (double x : node(a).value) s += x;
  const std::size_t ai = a.id_;
  return push({1, 1}, {s}, [ai](Graph& g, std::size_t self) {
    const double G = g.nodes_[self].grad[0];
    for (double& x : g.grad(ai)) x += G;
  });
}

Var Graph::sum(std::span<const Var> scalars) {
  double s = 0.0;
  std::vector<std::size_t> ids;
  for (Var v : scalars) {
    check_owner(v);
    if (node(v).shape.size() != 1) throw ShapeError("sum over non-scalar nodes");
    s += node(v).value[0];
    ids.push_back(v.id_);
  }
  return push({1, 1}, {s}, [ids](Graph& g, std::size_t self) {
    const double G = g.nodes_[self].grad[0];
    for (std::size_t id : ids) g.grad(id)[0] += G;
  });
}

Var Graph::dot(Var a, Var b) { return sum(mul(a, b)); }

Var Graph::softmax(Var logits) {
  check_owner(logits);
  std::vector<double> p = masked_softmax(node(logits).value);
  const std::size_t li = logits.id_;
  return push(node(logits).shape, std::move(p), [li](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    const auto& P = g.nodes_[self].value;
    double gp = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) gp += G[i] * P[i];
    auto& gl = g.grad(li);
    for (std::size_t i = 0; i < P.size(); ++i) gl[i] += P[i] * (G[i] - gp);
  });
}

Var Graph::attention_scores(Var query, Var keys, std::size_t heads) {
  check_owner(query);
  check_owner(keys);
  const Shape ks = node(keys).shape;
  const std::size_t d = ks.cols;
  if (node(query).shape != Shape{d, 1}) throw ShapeError("attention: query width differs from key width");
  if (heads == 0 || d % heads != 0) {
    throw ConfigError("attention: width " + std::to_string(d) + " not divisible by " +
                      std::to_string(heads) + " heads");
  }
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(d / heads));
  const auto& Q = node(query).value;
  const auto& K = node(keys).value;
  std::vector<double> out(ks.rows, 0.0);
  const std::size_t width = d / heads;
  for (std::size_t k = 0; k < ks.rows; ++k) {
    double total = 0.0;
    for (std::size_t h = 0; h < heads; ++h) {
      double s = 0.0;
      for (std::size_t c = h * width; c < (h + 1) * width; ++c) s += Q[c] * K[k * d + c];
      total += s * inv_scale;
    }
    out[k] = total;
  }
  const std::size_t qi = query.id_;
  const std::size_t ki = keys.id_;
  return push({ks.rows, 1}, std::move(out), [qi, ki, ks, inv_scale](Graph& g, std::size_t self) {
    const auto& G = g.nodes_[self].grad;
    const auto& Q = g.nodes_[qi].value;
    const auto& K = g.nodes_[ki].value;
    auto& gq = g.grad(qi);
    auto& gk = g.grad(ki);
    for (std::size_t k = 0; k < ks.rows; ++k) {
      const double gs = G[k] * inv_scale;
      for (std::size_t c = 0; c < ks.cols; ++c) {
        gq[c] += gs * K[k * ks.cols + c];
        gk[k * ks.cols + c] += gs * Q[c];
      }
    }
  });
}

Var Graph::log_prob(Var logits, std::span<const std::uint8_t> mask, std::size_t index) {
  check_owner(logits);
  const auto& L = node(logits).value;
  if (index >= L.size()) throw ShapeError("log_prob: index out of range");
  if (!mask.empty() && !mask[index]) throw ContractViolation("log_prob of a masked entry");
  std::vector<double> p = masked_softmax(L, mask);
  const double lp = std::log(p[index]);
  const std::size_t li = logits.id_;
  return push({1, 1}, {lp}, [li, index, p = std::move(p)](Graph& g, std::size_t self) {
    const double G = g.nodes_[self].grad[0];
    auto& gl = g.grad(li);
    for (std::size_t j = 0; j < p.size(); ++j) gl[j] -= G * p[j];
    gl[index] += G;
  });
}

Var Graph::entropy(Var logits, std::span<const std::uint8_t> mask) {
  check_owner(logits);
  std::vector<double> p = masked_softmax(node(logits).value, mask);
  double h = 0.0;
  std::vector<double> logp(p.size(), 0.0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) {
      logp[j] = std::log(p[j]);
      h -= p[j] * logp[j];
    }
  }
  const std::size_t li = logits.id_;
  return push({1, 1}, {h},
              [li, h, p = std::move(p), logp = std::move(logp)](Graph& g, std::size_t self) {
                const double G = g.nodes_[self].grad[0];
                auto& gl = g.grad(li);
                for (std::size_t j = 0; j < p.size(); ++j) {
                  if (p[j] > 0.0) gl[j] -= G * p[j] * (logp[j] + h);
                }
              });
}

void Graph::backward(Var loss) {
  check_owner(loss);
  if (consumed_) throw UsageError("backward() called on a consumed graph");
  if (node(loss).shape.size() != 1) throw ShapeError("backward() needs a scalar loss");
  for (auto& n : nodes_) n.grad.assign(n.value.size(), 0.0);
  nodes_[loss.id_].grad[0] = 1.0;
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backprop) n.backprop(*this, i);
    if (n.param) {
      for (std::size_t k = 0; k < n.grad.size(); ++k) n.param->grad[k] += n.grad[k];
    }
  }
  consumed_ = true;
  for (auto& n : nodes_) {
    n.backprop = nullptr;
    std::vector<double>().swap(n.grad);
  }
}

}  // namespace riskmine::nn
