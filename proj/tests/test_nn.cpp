#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "riskmine/error.hpp"
#include "riskmine/nn/categorical.hpp"
#include "riskmine/nn/checkpoint.hpp"
#include "riskmine/nn/graph.hpp"
#include "riskmine/nn/layers.hpp"
#include "riskmine/nn/parameter.hpp"
#include "test_support.hpp"

using namespace riskmine;
using namespace riskmine::nn;

namespace {

std::vector<double> random_values(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

void fill(Parameter& p, Rng& rng, double scale = 1.0) {
  for (auto& x : p.value) x = scale * rng.normal();
}

}  // namespace

TEST(Backward, SumOfParametersGivesUnitGradients) {
  ParameterStore store;
  Rng rng(1);
  auto& a = store.add("a", {3, 2}, ParamGroup::kHighPolicy);
  auto& b = store.add("b", {4, 1}, ParamGroup::kLowPolicy);
  fill(a, rng);
  fill(b, rng);
  Graph g;
  const Var parts[] = {g.sum(g.param(a)), g.sum(g.param(b))};
  g.backward(g.sum(parts));
  for (double x : a.grad) EXPECT_EQ(x, 1.0);
  for (double x : b.grad) EXPECT_EQ(x, 1.0);
}

TEST(Backward, SquareAtThreeGivesSix) {
  ParameterStore store;
  auto& x = store.add("x", {1, 1}, ParamGroup::kBaseline);
  x.value[0] = 3.0;
  Graph g;
  g.backward(g.square(g.param(x)));
  EXPECT_EQ(x.grad[0], 6.0);
}

TEST(Backward, SecondCallIsUsageError) {
  ParameterStore store;
  auto& x = store.add("x", {1, 1}, ParamGroup::kBaseline);
  Graph g;
  Var loss = g.square(g.param(x));
  g.backward(loss);
  EXPECT_TRUE(g.consumed());
  EXPECT_THROW(g.backward(loss), UsageError);
}

TEST(Backward, ParamNodeIsSharedWithinGraph) {
  ParameterStore store;
  auto& x = store.add("x", {1, 1}, ParamGroup::kBaseline);
  x.value[0] = 2.0;
  Graph g;
  Var a = g.param(x);
  Var b = g.param(x);
  EXPECT_EQ(a.id(), b.id());
  g.backward(g.mul(a, b));
  EXPECT_EQ(x.grad[0], 4.0);
}

TEST(Mlp, ZeroWeightsGiveZeroOutput) {
  ParameterStore store;
  Rng rng(2);
  Mlp mlp(store, "m", {3, 5, 2}, ParamGroup::kLowPolicy, rng);
  for (auto* p : store.all()) std::fill(p->value.begin(), p->value.end(), 0.0);
  Graph g;
  auto out = mlp.forward(g, g.input({1.0, -2.0, 3.0}));
  for (double v : out.value()) EXPECT_EQ(v, 0.0);
}

TEST(Mlp, IdentitySingleLayerReturnsInput) {
  ParameterStore store;
  Rng rng(3);
  Mlp mlp(store, "m", {3, 3}, ParamGroup::kLowPolicy, rng);
  auto& w = store.get("m.layer0.weight");
  std::fill(w.value.begin(), w.value.end(), 0.0);
  for (std::size_t i = 0; i < 3; ++i) w.value[i * 3 + i] = 1.0;
  Graph g;
  auto out = mlp.forward(g, g.input({0.5, -1.5, 2.25}));
  EXPECT_EQ(std::vector<double>(out.value().begin(), out.value().end()),
            (std::vector<double>{0.5, -1.5, 2.25}));
}

TEST(Mlp, TwoLayerMatchesHandComputation) {
  ParameterStore store;
  Rng rng(4);
  Mlp mlp(store, "m", {2, 2, 1}, ParamGroup::kLowPolicy, rng);
  store.get("m.layer0.weight").value = {0.5, -1.0, 0.25, 2.0};
  store.get("m.layer0.bias").value = {0.1, -0.2};
  store.get("m.layer1.weight").value = {1.5, -0.5};
  store.get("m.layer1.bias").value = {0.3};
  Graph g;
  auto out = mlp.forward(g, g.input({1.0, 2.0}));
  const double h0 = std::tanh(0.5 * 1.0 - 1.0 * 2.0 + 0.1);
  const double h1 = std::tanh(0.25 * 1.0 + 2.0 * 2.0 - 0.2);
  EXPECT_NEAR(out.item(), 1.5 * h0 - 0.5 * h1 + 0.3, 1e-12);
}

TEST(Mlp, WidthMismatchIsShapeError) {
  ParameterStore store;
  Rng rng(5);
  Mlp mlp(store, "m", {3, 2}, ParamGroup::kLowPolicy, rng);
  Graph g;
  EXPECT_THROW(mlp.forward(g, g.input({1.0, 2.0})), ShapeError);
}

TEST(Mlp, GlorotInitialisationBounds) {
  ParameterStore store;
  Rng rng(6);
  Mlp mlp(store, "m", {10, 30}, ParamGroup::kLowPolicy, rng);
  const double a = std::sqrt(6.0 / 40.0);
  for (double w : store.get("m.layer0.weight").value) EXPECT_LE(std::fabs(w), a);
  for (double b : store.get("m.layer0.bias").value) EXPECT_EQ(b, 0.0);
}

TEST(Attention, OrthogonalQueryGivesZeroLogits) {
  Graph g;
  Var keys = g.input({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0}, {3, 4});
  Var q = g.input({0, 0, 0, 2.0});
  auto s = g.attention_scores(q, keys, 1);
  for (double v : s.value()) EXPECT_EQ(v, 0.0);
  auto p = masked_softmax(s.value());
  for (double v : p) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(Attention, MatchingRowIsArgmax) {
  Graph g;
  Var keys = g.input({0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0}, {3, 4});
  Var q = g.input({1, 0, 0, 0});
  auto s = g.attention_scores(q, keys, 1);
  EXPECT_EQ(std::max_element(s.value().begin(), s.value().end()) - s.value().begin(), 1);
}

TEST(Attention, RandomInstanceMatchesDirectFormula) {
  Rng rng(7);
  auto k = random_values(rng, 12), q = random_values(rng, 4);
  Graph g;
  Var keys = g.input(k, {3, 4});
  Var query = g.input(q);
  auto one = g.attention_scores(query, keys, 1);
  auto two = g.attention_scores(query, keys, 2);
  for (std::size_t r = 0; r < 3; ++r) {
    double dot = 0.0, h0 = 0.0, h1 = 0.0;
    for (std::size_t c = 0; c < 4; ++c) dot += q[c] * k[r * 4 + c];
    for (std::size_t c = 0; c < 2; ++c) h0 += q[c] * k[r * 4 + c];
    for (std::size_t c = 2; c < 4; ++c) h1 += q[c] * k[r * 4 + c];
    EXPECT_NEAR(one.value()[r], dot / 2.0, 1e-12);
    EXPECT_NEAR(two.value()[r], (h0 + h1) / std::sqrt(2.0), 1e-12);
  }
  EXPECT_THROW(g.attention_scores(query, keys, 3), ConfigError);
}

TEST(GradientCheck, Mlp) {
  ParameterStore store;
  Rng rng(8);
  Mlp mlp(store, "m", {5, 7, 6, 3}, ParamGroup::kLowPolicy, rng);
  for (auto* p : store.all()) fill(*p, rng, 0.5);
  auto x = random_values(rng, 5);
  auto target = random_values(rng, 3);
  auto r = rmtest::gradient_check(store, [&](Graph& g) {
    Var out = mlp.forward(g, g.input(x));
    return g.sum(g.square(g.sub(out, g.input(target))));
  });
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(GradientCheck, EmbeddingAndAttention) {
  for (std::size_t heads : {1u, 2u, 4u}) {
    for (bool readout : {false, true}) {
      ParameterStore store;
      Rng rng(9 + heads);
      OptionEmbedding emb(store, "wc", 5, 8, rng);
      Mlp query(store, "q", {3 + 8, 8}, ParamGroup::kHighPolicy, rng);
      auto x = random_values(rng, 3);
      auto r = rmtest::gradient_check(store, [&](Graph& g) {
        const Var parts[] = {g.input(x), g.row(emb.node(g), 2)};
        Var logits = option_logits(g, query.forward(g, g.concat(parts)), emb.node(g), heads, readout);
        const Var terms[] = {g.log_prob(logits, {}, 3), g.scale(g.entropy(logits, {}), 0.3)};
        return g.sum(terms);
      });
      EXPECT_LT(r.max_rel_error, 1e-4) << r.worst << " heads " << heads;
    }
  }
}

TEST(GradientCheck, ElementwiseOps) {
  ParameterStore store;
  Rng rng(10);
  auto& a = store.add("a", {6, 1}, ParamGroup::kHighPolicy);
  auto& b = store.add("b", {6, 1}, ParamGroup::kHighPolicy);
  auto& m = store.add("m", {3, 6}, ParamGroup::kLowPolicy);
  fill(a, rng, 0.5);
  fill(b, rng, 0.5);
  fill(m, rng, 0.5);
  const std::vector<std::uint8_t> mask = {1, 0, 1, 1, 0, 1};
  auto r = rmtest::gradient_check(store, [&](Graph& g) {
    Var va = g.param(a), vb = g.param(b), vm = g.param(m);
    Var x = g.add(g.mul(va, g.tanh(vb)), g.exp(g.scale(va, 0.3)));
    Var y = g.matvec(vm, x);
    Var z = g.matvec_transposed(vm, y);
    Var c = g.clamp(g.add_scalar(z, 0.1), -50.0, 50.0);
    Var mn = g.minimum(c, g.scale(va, 2.0));
    Var sl = g.slice(mn, 1, 4);
    const Var parts[] = {g.dot(sl, sl), g.element(z, 2), g.sum(g.softmax(y)),
                         g.log_prob(z, mask, 3), g.entropy(z, mask), g.sum(g.square(y))};
    return g.sum(parts);
  });
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(Softmax, MaskedEntriesAreExactlyZeroAndShiftInvariant) {
  const std::vector<double> logits = {0.3, 2.0, -1.0, 0.7};
  const std::vector<std::uint8_t> mask = {1, 0, 1, 1};
  auto p = masked_softmax(logits, mask);
  EXPECT_EQ(p[1], 0.0);
  EXPECT_NEAR(p[0] + p[2] + p[3], 1.0, 1e-12);
  std::vector<double> shifted = logits;
  for (auto& x : shifted) x += 123.456;
  auto q = masked_softmax(shifted, mask);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
}

TEST(Categorical, EntropyExtremes) {
  Graph g;
  CategoricalDist uniform(g, g.input({0.0, 0.0, 0.0, 0.0}));
  EXPECT_NEAR(uniform.entropy().item(), std::log(4.0), 1e-15);
  CategoricalDist skewed(g, g.input({2.0, 0.0, 0.0, 0.0}));
  EXPECT_LT(skewed.entropy().item(), uniform.entropy().item());
  CategoricalDist one_hot(g, g.input({0.0, 5.0, 1.0, 0.0}), {0, 1, 0, 0});
  EXPECT_EQ(one_hot.entropy().item(), 0.0);
}

TEST(Categorical, SingleUnmaskedEntry) {
  Graph g;
  Rng rng(11);
  CategoricalDist d(g, g.input({0.1, -3.0, 2.0}), {0, 0, 1});
  auto s = d.sample(rng);
  EXPECT_EQ(s.index, 2u);
  EXPECT_EQ(s.log_prob.item(), 0.0);
}

TEST(Categorical, AllMaskedIsContractViolation) {
  Graph g;
  EXPECT_THROW(CategoricalDist(g, g.input({0.1, 0.2}), {0, 0}), ContractViolation);
}

TEST(Categorical, UniformFrequencies) {
  Graph g;
  CategoricalDist d(g, g.input({0.0, 0.0, 0.0, 0.0}));
  Rng rng(12);
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_index(d.probs(), rng)];
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int c : counts) EXPECT_LT(std::fabs(c - 0.25 * n), 3 * sigma);
}

TEST(Categorical, DeterministicForSeed) {
  const std::vector<double> p = {0.1, 0.2, 0.3, 0.4};
  Rng a(13), b(13);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_index(p, a), sample_index(p, b));
}

TEST(Categorical, LogProbGradientFlowsToLogits) {
  ParameterStore store;
  auto& l = store.add("l", {3, 1}, ParamGroup::kHighPolicy);
  l.value = {0.5, -0.2, 0.1};
  Graph g;
  CategoricalDist d(g, g.param(l));
  g.backward(d.log_prob(0));
  const auto& p = d.probs();
  EXPECT_NEAR(l.grad[0], 1.0 - p[0], 1e-15);
  EXPECT_NEAR(l.grad[1], -p[1], 1e-15);
}

TEST(RngState, RoundTrip) {
  Rng a(99);
  a.normal();
  Rng b;
  b.set_state(a.state());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.normal(), b.normal());
}

TEST(Checkpoint, RoundTripIsBitExact) {
  ParameterStore store;
  Rng rng(14);
  Mlp mlp(store, "m", {4, 6, 2}, ParamGroup::kLowPolicy, rng);
  OptionEmbedding emb(store, "wc", 3, 4, rng);
  for (auto* p : store.all()) fill(*p, rng);
  const auto path = std::filesystem::temp_directory_path() / "riskmine_ckpt_test.bin";
  save_checkpoint(store, {"abc123", rng.state()}, path);

  ParameterStore other;
  Rng rng2(15);
  Mlp mlp2(other, "m", {4, 6, 2}, ParamGroup::kLowPolicy, rng2);
  OptionEmbedding emb2(other, "wc", 3, 4, rng2);
  auto meta = load_checkpoint(other, path);
  EXPECT_EQ(meta.fingerprint, "abc123");
  EXPECT_EQ(meta.rng_state, rng.state());
  auto pa = store.all();
  auto pb = other.all();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value);
  auto x = random_values(rng, 4);
  Graph g1, g2;
  auto o1 = mlp.forward(g1, g1.input(x));
  auto o2 = mlp2.forward(g2, g2.input(x));
  EXPECT_EQ(std::vector<double>(o1.value().begin(), o1.value().end()),
            std::vector<double>(o2.value().begin(), o2.value().end()));

  ParameterStore wrong;
  Mlp mlp3(wrong, "m", {4, 5, 2}, ParamGroup::kLowPolicy, rng2);
  OptionEmbedding emb3(wrong, "wc", 3, 4, rng2);
  EXPECT_THROW(load_checkpoint(wrong, path), ShapeError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, GarbageFileIsFormatError) {
  const auto path = std::filesystem::temp_directory_path() / "riskmine_ckpt_garbage.bin";
  {
    std::ofstream out(path);
    out << "not a checkpoint";
  }
  ParameterStore store;
  EXPECT_THROW(load_checkpoint(store, path), FormatError);
  std::filesystem::remove(path);
}
