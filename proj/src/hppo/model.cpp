#include "riskmine/hppo/model.hpp"

#include "riskmine/error.hpp"

namespace riskmine::hppo {
namespace {

std::vector<std::size_t> widths(std::size_t in, const PolicyConfig& c, std::size_t out) {
  std::vector<std::size_t> w{in};
  for (std::size_t i = 0; i < c.hidden_layers; ++i) w.push_back(c.hidden_width);
  w.push_back(out);
  return w;
}

}  // namespace

HppoModel::HppoModel(const PolicyConfig& config, std::size_t num_options,
                     std::size_t max_length, std::uint64_t seed)
    : config_(config), vocab_(config.enable_pow), num_options_(num_options),
      max_length_(max_length) {
  if (num_options == 0) throw ConfigError("the option catalog is empty");
  if (config.initial_option >= num_options) {
    throw ConfigError("policy.initial_option is outside the option catalog");
  }
  if (config.heads == 0 || config.embedding_dim % config.heads != 0) {
    throw ConfigError("policy.embedding_dim must be divisible by policy.heads");
  }
  Rng rng(seed);
  const std::size_t d = config.embedding_dim;
  const std::size_t v = vocab_.size();
  const std::size_t s = market::kFeatureCount;
  embedding_ = nn::OptionEmbedding(store_, "option_embedding", num_options, d, rng);
  high_query_ = nn::Mlp(store_, "high", widths(s + d, config, d), nn::ParamGroup::kHighPolicy, rng);
  low_policy_ =
      nn::Mlp(store_, "low", widths(s + d + v + v + 1, config, v), nn::ParamGroup::kLowPolicy, rng);
  low_baseline_ =
      nn::Mlp(store_, "baseline", widths(s + d, config, 1), nn::ParamGroup::kBaseline, rng);
}

nn::Var HppoModel::embedding_row(nn::Graph& g, std::size_t option) const {
  if (option >= num_options_) throw ContractViolation("option index out of range");
  return g.row(embedding_.node(g), option);
}

nn::Var HppoModel::state_input(nn::Graph& g, const State& state) const {
  return g.input(std::vector<double>(state.begin(), state.end()));
}

nn::Var HppoModel::high_logits(nn::Graph& g, const State& state, std::size_t prev_option) const {
  const nn::Var parts[] = {state_input(g, state), embedding_row(g, prev_option)};
  nn::Var query = high_query_.forward(g, g.concat(parts));
  return nn::option_logits(g, query, embedding_.node(g), config_.heads, config_.value_readout);
}

nn::Var HppoModel::low_logits(nn::Graph& g, const State& state, std::size_t option,
                              std::span<const expr::Op> partial) const {
  const std::size_t v = vocab_.size();
  std::vector<double> context(v + v + 1, 0.0);
  const double unit = 1.0 / static_cast<double>(max_length_);
  for (expr::Op op : partial) {
    auto i = vocab_.index_of(op);
    if (!i) throw ContractViolation("token outside the policy vocabulary");
    context[*i] += unit;
  }
  const std::size_t last = partial.empty() ? v : *vocab_.index_of(partial.back());
  context[v + last] = 1.0;
  const nn::Var parts[] = {state_input(g, state), embedding_row(g, option),
                           g.input(std::move(context))};
  return low_policy_.forward(g, g.concat(parts));
}

nn::Var HppoModel::baseline(nn::Graph& g, const State& state, std::size_t option) const {
  const nn::Var parts[] = {state_input(g, state), embedding_row(g, option)};
  return low_baseline_.forward(g, g.concat(parts));
}

std::vector<double> HppoModel::option_probs(const State& state, std::size_t prev_option) const {
  nn::Graph g;
  nn::Var logits = high_logits(g, state, prev_option);
  return nn::masked_softmax(logits.value());
}

std::vector<double> HppoModel::baselines(const State& state) const {
  nn::Graph g;
  std::vector<double> out(num_options_);
  for (std::size_t k = 0; k < num_options_; ++k) out[k] = baseline(g, state, k).item();
  return out;
}

void HppoModel::reinitialize_high(Rng& rng) { high_query_.reinitialize(rng); }

double baseline_high(std::span<const double> option_probs, std::span<const double> b_low) {
  if (option_probs.size() != b_low.size()) {
    throw ShapeError("option probabilities and baselines differ in length");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < b_low.size(); ++k) sum += option_probs[k] * b_low[k];
  return sum;
}

double baseline_high(const HppoModel& model, const State& state, std::size_t prev_option) {
  return baseline_high(model.option_probs(state, prev_option), model.baselines(state));
}

}  // namespace riskmine::hppo
