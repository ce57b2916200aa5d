#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tmkit {

struct SourceSpan {
  std::string file;
  int line = 0;
  int column_start = 0;
  int column_end = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// A finding about a model artifact. `code` is a stable short phrase
/// ("illegal stage succession", "uncovered node", ...) that tests and
/// tooling match on; `subject` names the offending id when there is one.
struct Diagnostic {
  std::string code;
  std::string message;
  std::string subject;
  SourceSpan span{};

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

std::string to_string(const Diagnostic& d);
std::ostream& operator<<(std::ostream& os, const Diagnostic& d);

}  // namespace tmkit
