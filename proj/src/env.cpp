#include "mcalc/env.hpp"

namespace mcalc {

Value::Value(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size()) throw ShapeMismatch("value data does not match " + shape_.to_string());
}

Value Value::zeros(const Shape& shape) { return Value(shape, std::vector<double>(shape.size(), 0.0)); }

double Value::scalar() const {
  if (!is_scalar()) throw ShapeMismatch("expected a scalar, got " + shape_.to_string());
  return data_[0];
}

Env& Env::bind(const std::string& name, Value v) {
  bindings_.insert_or_assign(name, std::move(v));
  return *this;
}

const Value& Env::at(const std::string& name) const {
  auto it = bindings_.find(name);
  if (it == bindings_.end()) throw UnboundVariable("unbound variable '" + name + "'");
  return it->second;
}

Value& Env::at(const std::string& name) {
  auto it = bindings_.find(name);
  if (it == bindings_.end()) throw UnboundVariable("unbound variable '" + name + "'");
  return it->second;
}

}  // namespace mcalc
