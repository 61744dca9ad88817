#include "riskmine/nn/parameter.hpp"

#include <algorithm>

#include "riskmine/error.hpp"

namespace riskmine::nn {

Parameter& ParameterStore::add(std::string name, Shape shape, ParamGroup group) {
  for (const auto& p : params_) {
    if (p->name == name) throw UsageError("duplicate parameter name '" + name + "'");
  }
  auto p = std::make_unique<Parameter>();
  p->name = std::move(name);
  p->shape = shape;
  p->group = group;
  p->value.assign(shape.size(), 0.0);
  p->grad.assign(shape.size(), 0.0);
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParameterStore::get(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return *p;
  }
  throw UsageError("no parameter named '" + name + "'");
}

const Parameter& ParameterStore::get(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return *p;
  }
  throw UsageError("no parameter named '" + name + "'");
}

std::vector<Parameter*> ParameterStore::all() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParameterStore::all() const {
  std::vector<const Parameter*> out;
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

}  // namespace riskmine::nn
