#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tmkit/carve/carve.hpp"
#include "tmkit/core/diagnostic.hpp"
#include "tmkit/core/expected.hpp"
#include "tmkit/core/model.hpp"
#include "tmkit/events/events.hpp"
#include "tmkit/harness/scenario.hpp"

namespace tmkit {

struct ParseError {
  SourceSpan span;
  std::string message;
  /// descriptions of the tokens that would have been accepted
  std::vector<std::string> expected;

  friend bool operator==(const ParseError&, const ParseError&) = default;
};

using ParseErrors = std::vector<ParseError>;

std::string to_string(const ParseError& e);

/// Where each name was mentioned in a source file, used to place
/// diagnostics that only carry a subject.
class SourceMap {
 public:
  explicit SourceMap(std::string file = "<input>") : file_(std::move(file)) {}

  void mention(const std::string& name, SourceSpan span);
  /// Sets the span of every diagnostic that has none. Duplicates point at
  /// the last mention of their subject, everything else at the first.
  void locate(Diagnostics& diags) const;
  [[nodiscard]] SourceSpan locate(const Diagnostic& d) const;

 private:
  std::string file_;
  std::map<std::string, std::vector<SourceSpan>> mentions_;
};

/// Syntax only: the declarations as written.
Expected<ModelDecl, ParseErrors> parse_model_decl(std::string_view text, const std::string& file = "<input>",
                                                  SourceMap* map = nullptr);

/// Syntax plus resolution. Resolution failures come back as errors placed
/// at the first mention of their subject.
Expected<StaticModel, ParseErrors> parse_model(std::string_view text, const std::string& file = "<input>",
                                               SourceMap* map = nullptr);

/// Canonical text, declarations in model order.
std::string serialize_model(const ModelDecl& decl);
std::string serialize_model(const StaticModel& model);

Expected<EventsModel, ParseErrors> parse_events(std::string_view text, const StaticModel& model,
                                                const std::string& file = "<input>");
std::string serialize_events(const std::vector<Event>& events);

Expected<std::vector<SuperEvent>, ParseErrors> parse_groups(std::string_view text,
                                                            const std::string& file = "<input>");
std::string serialize_groups(const std::vector<SuperEvent>& groups);

Expected<std::vector<Scenario>, ParseErrors> parse_scenarios(std::string_view text,
                                                             const std::string& file = "<input>");
std::string serialize_scenarios(const std::vector<Scenario>& scenarios);

/// Errors as Diagnostics with code "syntax error".
Diagnostics to_diagnostics(const ParseErrors& errors);

}  // namespace tmkit
