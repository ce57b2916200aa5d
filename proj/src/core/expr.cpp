#include "tmkit/core/expr.hpp"

#include <sstream>

namespace tmkit {

ValueType type_of(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) ? ValueType::integer : ValueType::text;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::add:
    case Expr::Kind::sub:
      return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div:
      return 2;
    default:
      return 3;
  }
}

std::string path_text(const std::string& head, const std::string& attr) {
  return attr.empty() ? head : head + "." + attr;
}

std::int64_t as_int(const Value& v, const char* what) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw EvalError(std::string("text operand in ") + what);
}

}  // namespace

std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return quote(std::get<std::string>(v));
}

std::string to_string(ValueType t) { return t == ValueType::integer ? "int" : "text"; }

std::string to_string(const ThingInstance& t) {
  std::string out = t.type + "(";
  bool first = true;
  for (const auto& [k, v] : t.attrs) {
    if (!first) out += ", ";
    first = false;
    out += k + " = " + to_string(v);
  }
  return out + ")";
}

Expr Expr::lit(Value v) {
  Expr e;
  e.kind = Kind::literal;
  e.literal = std::move(v);
  return e;
}

Expr Expr::ref(std::string head, std::string attr) {
  Expr e;
  e.kind = Kind::path;
  e.head = std::move(head);
  e.attr = std::move(attr);
  return e;
}

Expr Expr::binary(Kind k, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = k;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr Expr::sum_of(std::string head, std::string attr) {
  Expr e;
  e.kind = Kind::sum;
  e.head = std::move(head);
  e.attr = std::move(attr);
  return e;
}

Expr Expr::size_of(std::string head) {
  Expr e;
  e.kind = Kind::size;
  e.head = std::move(head);
  return e;
}

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::literal:
      return to_string(e.literal);
    case Expr::Kind::path:
      return path_text(e.head, e.attr);
    case Expr::Kind::sum:
      return "sum(" + path_text(e.head, e.attr) + ")";
    case Expr::Kind::size:
      return "size(" + e.head + ")";
    default:
      break;
  }
  const char* op = e.kind == Expr::Kind::add   ? " + "
                   : e.kind == Expr::Kind::sub ? " - "
                   : e.kind == Expr::Kind::mul ? " * "
                                               : " / ";
  const int p = precedence(e.kind);
  auto lhs = to_string(e.args[0]);
  auto rhs = to_string(e.args[1]);
  if (precedence(e.args[0].kind) < p) lhs = "(" + lhs + ")";
  // left-associative: an equal-precedence right operand needs parentheses
  if (precedence(e.args[1].kind) <= p) rhs = "(" + rhs + ")";
  return lhs + op + rhs;
}

Value evaluate(const Expr& e, const ExprEnv& env) {
  switch (e.kind) {
    case Expr::Kind::literal:
      return e.literal;
    case Expr::Kind::path:
      return env.path(e.head, e.attr);
    case Expr::Kind::sum:
      if (!env.sum) throw EvalError("sum() not available here");
      return env.sum(e.head, e.attr);
    case Expr::Kind::size:
      if (!env.size) throw EvalError("size() not available here");
      return env.size(e.head);
    default:
      break;
  }
  const Value lhs = evaluate(e.args[0], env);
  const Value rhs = evaluate(e.args[1], env);
  if (e.kind == Expr::Kind::add && type_of(lhs) == ValueType::text &&
      type_of(rhs) == ValueType::text) {
    return std::get<std::string>(lhs) + std::get<std::string>(rhs);
  }
  const auto a = as_int(lhs, "arithmetic");
  const auto b = as_int(rhs, "arithmetic");
  switch (e.kind) {
    case Expr::Kind::add:
      return a + b;
    case Expr::Kind::sub:
      return a - b;
    case Expr::Kind::mul:
      return a * b;
    case Expr::Kind::div:
      if (b == 0) throw EvalError("division by zero");
      return a / b;
    default:
      throw EvalError("bad expression");
  }
}

void collect_paths(const Expr& e, std::vector<std::pair<std::string, std::string>>& out) {
  if (e.kind == Expr::Kind::path) out.emplace_back(e.head, e.attr);
  for (const auto& a : e.args) collect_paths(a, out);
}

std::string to_string(CmpOp op) {
  switch (op) {
    case CmpOp::eq:
      return "=";
    case CmpOp::ne:
      return "!=";
    case CmpOp::lt:
      return "<";
    case CmpOp::le:
      return "<=";
    case CmpOp::gt:
      return ">";
    case CmpOp::ge:
      return ">=";
  }
  return "?";
}

std::optional<CmpOp> parse_cmp_op(std::string_view s) {
  if (s == "=" || s == "==") return CmpOp::eq;
  if (s == "!=" || s == "\xE2\x89\xA0") return CmpOp::ne;  // ≠
  if (s == "<") return CmpOp::lt;
  if (s == "<=" || s == "\xE2\x89\xA4") return CmpOp::le;  // ≤
  if (s == ">") return CmpOp::gt;
  if (s == ">=" || s == "\xE2\x89\xA5") return CmpOp::ge;  // ≥
  return std::nullopt;
}

std::string to_string(const Guard& g) {
  return to_string(g.lhs) + " " + to_string(g.op) + " " + to_string(g.rhs);
}

bool compare(const Value& lhs, CmpOp op, const Value& rhs) {
  if (lhs.index() != rhs.index()) throw EvalError("comparison of int with text");
  switch (op) {
    case CmpOp::eq:
      return lhs == rhs;
    case CmpOp::ne:
      return lhs != rhs;
    case CmpOp::lt:
      return lhs < rhs;
    case CmpOp::le:
      return lhs <= rhs;
    case CmpOp::gt:
      return lhs > rhs;
    case CmpOp::ge:
      return lhs >= rhs;
  }
  return false;
}

bool evaluate(const Guard& g, const ExprEnv& env) {
  return compare(evaluate(g.lhs, env), g.op, evaluate(g.rhs, env));
}

}  // namespace tmkit
