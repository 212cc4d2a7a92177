#include "numeric.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace mcalc::detail {

double apply_unary(Op op, double x, double exponent) {
  switch (op) {
    case Op::Neg: return -x;
    case Op::Sin: return std::sin(x);
    case Op::Cos: return std::cos(x);
    case Op::Exp: return std::exp(x);
    case Op::Max0: return x > 0.0 ? x : 0.0;
    case Op::Step: return x > 0.0 ? 1.0 : 0.0;
    case Op::Ln:
      if (!(x > 0.0)) throw DomainError("ln of nonpositive value " + std::to_string(x));
      return std::log(x);
    case Op::Pow:
      if (x == 0.0 && exponent < 0.0) throw DivisionByZero("zero raised to a negative power");
      if (x < 0.0 && std::trunc(exponent) != exponent) {
        throw DomainError("negative base " + std::to_string(x) + " raised to non-integer power");
      }
      if (exponent == 1.0) return x;
      if (exponent == 2.0) return x * x;
      return std::pow(x, exponent);
    default:
      throw Error("not a unary operator: " + std::string(op_name(op)));
  }
}

namespace {

double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul:
    case Op::Hadamard: return a * b;
    case Op::HadamardDiv:
      if (b == 0.0) throw DivisionByZero("element-wise division by zero");
      return a / b;
    default:
      throw Error("not a binary operator: " + std::string(op_name(op)));
  }
}

}  // namespace

Value apply_op(const Expr& node, std::span<const Value> args) {
  switch (node.op()) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Hadamard:
    case Op::HadamardDiv: {
      const Value& a = args[0];
      const Value& b = args[1];
      std::vector<double> out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) out[i] = apply_binary(node.op(), a[i], b[i]);
      return Value(node.shape(), std::move(out));
    }
    case Op::Expand:
      return Value(node.shape(), std::vector<double>(node.shape().size(), args[0].scalar()));
    case Op::Sum: {
      double s = 0.0;
      for (double v : args[0].data()) s += v;
      return s;
    }
    case Op::Dot: {
      double s = 0.0;
      for (std::size_t i = 0; i < args[0].size(); ++i) s += args[0][i] * args[1][i];
      return s;
    }
    default: {
      const Value& a = args[0];
      std::vector<double> out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) out[i] = apply_unary(node.op(), a[i], node.exponent());
      return Value(node.shape(), std::move(out));
    }
  }
}

}  // namespace mcalc::detail
