#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace riskmine::nn {

struct Shape {
  std::size_t rows = 1;
  std::size_t cols = 1;

  std::size_t size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
};

// Which policy or critic a parameter belongs to; drives learning rates and
// freezing during transfer.
enum class ParamGroup { kHighPolicy, kLowPolicy, kEmbedding, kBaseline };

struct Parameter {
  std::string name;
  Shape shape;
  ParamGroup group = ParamGroup::kHighPolicy;
  std::vector<double> value;
  std::vector<double> grad;
};

// Owns parameters at stable addresses, in insertion order.
class ParameterStore {
 public:
  Parameter& add(std::string name, Shape shape, ParamGroup group);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;

  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  std::size_t count() const { return params_.size(); }

  void zero_grad();

  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

}  // namespace riskmine::nn
