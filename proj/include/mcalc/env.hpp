#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mcalc/expr.hpp"

namespace mcalc {

/// Numeric value of an expression: a scalar or a column vector.
class Value {
 public:
  Value(double v) : data_{v} {}  // NOLINT(google-explicit-constructor)
  explicit Value(std::vector<double> v) : shape_(Shape::vector(v.size())), data_(std::move(v)) {}
  Value(Shape shape, std::vector<double> data);

  static Value zeros(const Shape& shape);

  const Shape& shape() const { return shape_; }
  bool is_scalar() const { return shape_.is_scalar(); }
  std::size_t size() const { return data_.size(); }
  double scalar() const;
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  friend bool operator==(const Value&, const Value&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Variable bindings used for evaluation.
class Env {
 public:
  Env() = default;

  Env& bind(const std::string& name, Value v);
  Env& bind(const std::string& name, std::initializer_list<double> v) {
    return bind(name, Value(std::vector<double>(v)));
  }

  bool contains(const std::string& name) const { return bindings_.count(name) != 0; }
  /// Throws UnboundVariable.
  const Value& at(const std::string& name) const;
  Value& at(const std::string& name);

  const std::map<std::string, Value>& bindings() const { return bindings_; }

 private:
  std::map<std::string, Value> bindings_;
};

}  // namespace mcalc
