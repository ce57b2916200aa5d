#include "tmkit/harness/scenario.hpp"

namespace tmkit {

std::string to_string(const Assertion& a) {
  std::string out;
  if (a.when) out += "if " + to_string(*a.when) + ": ";
  switch (a.kind) {
    case Assertion::Kind::fires:
      out += "fires " + a.target;
      for (std::size_t i = 0; i < a.with.size(); ++i) {
        out += (i ? ", " : " with ") + a.with_type + "." + a.with[i].first + " = " + to_string(a.with[i].second);
      }
      break;
    case Assertion::Kind::never:
      out += "never " + a.target;
      break;
    case Assertion::Kind::count:
      out += "count " + a.target + " <= " + to_string(a.bound);
      break;
    case Assertion::Kind::store_size:
      out += "store " + a.store + " size = " + to_string(a.bound);
      break;
    case Assertion::Kind::store_only: {
      out += "store " + a.store + " only " + a.only->type + "(";
      for (std::size_t i = 0; i < a.only->attrs.size(); ++i) {
        out += (i ? ", " : "") + a.only->attrs[i].first + " = " + to_string(a.only->attrs[i].second);
      }
      out += ")";
      break;
    }
  }
  return out;
}

}  // namespace tmkit
