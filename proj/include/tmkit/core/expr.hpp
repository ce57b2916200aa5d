#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tmkit {

/// Attribute values: integers (money in the smallest currency unit, counts)
/// and text (names, codes).
using Value = std::variant<std::int64_t, std::string>;

enum class ValueType { integer, text };

ValueType type_of(const Value& v);
std::string to_string(const Value& v);
std::string to_string(ValueType t);

struct ThingInstance {
  std::string type;
  std::map<std::string, Value> attrs;

  friend bool operator==(const ThingInstance&, const ThingInstance&) = default;
};

std::string to_string(const ThingInstance& t);

/// Arithmetic over attribute paths. A path is `head.attr` (thing attribute
/// or tuple-binding field) or a bare `head` (scalar binding).
struct Expr {
  enum class Kind { literal, path, add, sub, mul, div, sum, size };

  Kind kind = Kind::literal;
  Value literal{std::int64_t{0}};
  std::string head;
  std::string attr;
  std::vector<Expr> args;

  static Expr lit(Value v);
  static Expr ref(std::string head, std::string attr = {});
  static Expr binary(Kind k, Expr lhs, Expr rhs);
  /// sum(head) or sum(head.attr)
  static Expr sum_of(std::string head, std::string attr = {});
  /// size(head)
  static Expr size_of(std::string head);

  friend bool operator==(const Expr&, const Expr&) = default;
};

std::string to_string(const Expr& e);

/// Raised when an expression cannot be evaluated (missing attribute, type
/// mismatch, division by zero).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Resolves the leaves of an expression. Implementations throw EvalError
/// for names they do not know.
struct ExprEnv {
  std::function<Value(const std::string& head, const std::string& attr)> path;
  std::function<Value(const std::string& head, const std::string& attr)> sum;
  std::function<Value(const std::string& head)> size;
};

Value evaluate(const Expr& e, const ExprEnv& env);

/// Collects every `head.attr` / `head` leaf referenced by the expression.
void collect_paths(const Expr& e, std::vector<std::pair<std::string, std::string>>& out);

enum class CmpOp { eq, ne, lt, le, gt, ge };

std::string to_string(CmpOp op);
std::optional<CmpOp> parse_cmp_op(std::string_view s);

struct Guard {
  Expr lhs;
  CmpOp op = CmpOp::eq;
  Expr rhs;

  friend bool operator==(const Guard&, const Guard&) = default;
};

std::string to_string(const Guard& g);

/// Throws EvalError when the operand types differ.
bool compare(const Value& lhs, CmpOp op, const Value& rhs);
bool evaluate(const Guard& g, const ExprEnv& env);

}  // namespace tmkit
