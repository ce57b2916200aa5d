#include "tmkit/core/diagnostic.hpp"

namespace tmkit {

std::string to_string(const Diagnostic& d) {
  std::string out;
  if (!d.span.file.empty() || d.span.line > 0) {
    out += d.span.file.empty() ? "<input>" : d.span.file;
    out += ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column_start) + ": ";
  }
  out += d.code;
  if (!d.message.empty()) out += ": " + d.message;
  return out;
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) { return os << to_string(d); }

}  // namespace tmkit
