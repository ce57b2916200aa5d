#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmkit/core/expr.hpp"
#include "tmkit/dsl/dsl.hpp"

namespace tmkit::dsl {

enum class Tok { ident, integer, text, symbol, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;  // identifier, symbol, or decoded string
  std::int64_t number = 0;
  int column = 0;    // 1-based byte columns
  int column_end = 0;
};

struct Line {
  int number = 0;
  std::string_view raw;
  std::vector<Token> tokens;  // always ends with Tok::end
};

/// Splits text into non-blank lines of tokens. `#` starts a comment.
/// Lexical errors are appended to `errors` and drop their line.
std::vector<Line> lex(std::string_view text, const std::string& file, ParseErrors& errors);

/// Thrown by Cursor on a syntax error; the caller records it and moves to
/// the next line.
struct SyntaxError {
  ParseError error;
};

/// Token cursor over one line.
class Cursor {
 public:
  Cursor(const Line& line, const std::string& file) : line_(line), file_(file) {}

  [[nodiscard]] const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  [[nodiscard]] bool at_end() const { return peek().kind == Tok::end; }
  [[nodiscard]] bool is(std::string_view symbol_or_word) const;
  bool accept(std::string_view symbol_or_word);
  void expect(std::string_view symbol_or_word);
  std::string ident(std::string_view what);
  std::int64_t integer(std::string_view what);
  std::string text(std::string_view what);
  void finish();

  [[nodiscard]] SourceSpan span(const Token& t) const;
  [[noreturn]] void fail(std::vector<std::string> expected) const;
  [[noreturn]] void fail_at(const Token& t, std::string message) const;

  Value literal();
  Expr expr();
  Guard guard();
  ThingTemplate thing_template();

  [[nodiscard]] const Line& line() const { return line_; }

  /// Called for every identifier the cursor consumes.
  SourceMap* map = nullptr;

 private:
  Expr term();
  Expr factor();

  const Line& line_;
  const std::string& file_;
  std::size_t pos_ = 0;
};

std::string describe(const Token& t);

}  // namespace tmkit::dsl
