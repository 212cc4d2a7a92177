#include <array>
#include <charconv>
#include <cmath>

#include "mcalc/parser.hpp"

namespace mcalc {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

namespace {

// Binding strength of the printed form; higher binds tighter.
enum Level { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

struct Printed {
  std::string text;
  int level;
};

std::string wrap(const Printed& p, bool parens) { return parens ? "(" + p.text + ")" : p.text; }

Printed print(const Expr& e) {
  switch (e.op()) {
    case Op::Var:
      if (e.is_component()) return {e.name() + "_" + std::to_string(*e.component() + 1), kAtom};
      return {e.name(), kAtom};
    case Op::Const:
      if (e.value() < 0) return {"-" + format_number(-e.value()), kUnary};
      return {format_number(e.value()), kAtom};
    case Op::ConstVec: {
      std::string s = "[";
      for (std::size_t i = 0; i < e.values().size(); ++i) {
        if (i) s += ", ";
        s += format_number(e.values()[i]);
      }
      return {s + "]", kAtom};
    }
    case Op::Expand:
      return print(e.child(0));
    case Op::Add:
    case Op::Sub: {
      Printed l = print(e.child(0));
      Printed r = print(e.child(1));
      const char* op = e.op() == Op::Add ? " + " : " - ";
      return {wrap(l, l.level < kSum) + op + wrap(r, r.level <= kSum), kSum};
    }
    case Op::Mul:
    case Op::Hadamard:
    case Op::HadamardDiv: {
      Printed l = print(e.child(0));
      Printed r = print(e.child(1));
      const char* op = e.op() == Op::Mul ? " * " : e.op() == Op::Hadamard ? " (*) " : " (/) ";
      return {wrap(l, l.level < kProduct) + op + wrap(r, r.level <= kProduct), kProduct};
    }
    case Op::Neg: {
      Printed c = print(e.child(0));
      return {"-" + wrap(c, c.level < kUnary), kUnary};
    }
    case Op::Pow: {
      Printed b = print(e.child(0));
      return {wrap(b, b.level < kAtom) + "^" + format_number(e.exponent()), kPower};
    }
    case Op::Dot:
      return {"dot(" + print(e.child(0)).text + ", " + print(e.child(1)).text + ")", kAtom};
    default:
      return {std::string(op_name(e.op())) + "(" + print(e.child(0)).text + ")", kAtom};
  }
}

}  // namespace

std::string pretty_print(const Expr& e) { return print(e).text; }

}  // namespace mcalc
