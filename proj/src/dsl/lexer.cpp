#include "lexer.hpp"

#include <array>
#include <cctype>

namespace tmkit::dsl {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

constexpr std::array<std::string_view, 9> kLongSymbols{"->", "..", "!=", "<=", ">=", "≠", "≤", "≥", "=="};
constexpr std::string_view kShortSymbols = ":,(){};=<>+-*/.[]";

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += i + 1 == parts.size() ? " or " : ", ";
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::ident:
      return "'" + t.text + "'";
    case Tok::integer:
      return "number " + std::to_string(t.number);
    case Tok::text:
      return "string";
    case Tok::symbol:
      return "'" + t.text + "'";
    case Tok::end:
      return "end of line";
  }
  return "?";
}

std::vector<Line> lex(std::string_view text, const std::string& file, ParseErrors& errors) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    std::string_view raw = text.substr(start, stop - start);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    ++number;
    start = stop + 1;

    Line line{number, raw, {}};
    bool bad = false;
    std::size_t i = 0;
    while (i < raw.size() && !bad) {
      const char c = raw[i];
      const int col = static_cast<int>(i) + 1;
      if (c == ' ' || c == '\t') {
        ++i;
      } else if (c == '#') {
        break;
      } else if (ident_start(c)) {
        auto j = i;
        while (j < raw.size() && ident_char(raw[j])) ++j;
        line.tokens.push_back({Tok::ident, std::string(raw.substr(i, j - i)), 0, col, static_cast<int>(j)});
        i = j;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        auto j = i;
        std::int64_t v = 0;
        while (j < raw.size() && std::isdigit(static_cast<unsigned char>(raw[j]))) {
          v = v * 10 + (raw[j] - '0');
          ++j;
        }
        line.tokens.push_back({Tok::integer, std::string(raw.substr(i, j - i)), v, col, static_cast<int>(j)});
        i = j;
      } else if (c == '"') {
        std::string s;
        auto j = i + 1;
        bool closed = false;
        while (j < raw.size()) {
          if (raw[j] == '\\' && j + 1 < raw.size()) {
            s.push_back(raw[j + 1]);
            j += 2;
          } else if (raw[j] == '"') {
            closed = true;
            ++j;
            break;
          } else {
            s.push_back(raw[j++]);
          }
        }
        if (!closed) {
          errors.push_back({{file, number, col, static_cast<int>(raw.size())}, "unterminated string", {"'\"'"}});
          bad = true;
        } else {
          line.tokens.push_back({Tok::text, std::move(s), 0, col, static_cast<int>(j)});
          i = j;
        }
      } else {
        std::string_view sym;
        for (auto s : kLongSymbols) {
          if (raw.substr(i, s.size()) == s) {
            sym = s;
            break;
          }
        }
        if (sym.empty() && kShortSymbols.find(c) != std::string_view::npos) sym = raw.substr(i, 1);
        if (sym.empty()) {
          errors.push_back({{file, number, col, col}, "unexpected character '" + std::string(1, c) + "'", {}});
          bad = true;
        } else {
          line.tokens.push_back(
              {Tok::symbol, std::string(sym), 0, col, static_cast<int>(i + sym.size())});
          i += sym.size();
        }
      }
    }
    if (bad || line.tokens.empty()) continue;
    const int eol = static_cast<int>(raw.size()) + 1;
    line.tokens.push_back({Tok::end, {}, 0, eol, eol});
    lines.push_back(std::move(line));
  }
  return lines;
}

const Token& Cursor::peek(std::size_t ahead) const {
  const auto i = std::min(pos_ + ahead, line_.tokens.size() - 1);
  return line_.tokens[i];
}

const Token& Cursor::next() {
  const Token& t = peek();
  if (t.kind != Tok::end) ++pos_;
  return t;
}

bool Cursor::is(std::string_view word) const {
  const auto& t = peek();
  return (t.kind == Tok::symbol || t.kind == Tok::ident) && t.text == word;
}

bool Cursor::accept(std::string_view word) {
  if (!is(word)) return false;
  next();
  return true;
}

void Cursor::expect(std::string_view word) {
  if (!accept(word)) fail({"'" + std::string(word) + "'"});
}

std::string Cursor::ident(std::string_view what) {
  if (peek().kind != Tok::ident) fail({std::string(what)});
  const auto& t = next();
  if (map) map->mention(t.text, span(t));
  return t.text;
}

std::int64_t Cursor::integer(std::string_view what) {
  if (peek().kind != Tok::integer) fail({std::string(what)});
  return next().number;
}

std::string Cursor::text(std::string_view what) {
  if (peek().kind != Tok::text) fail({std::string(what)});
  return next().text;
}

void Cursor::finish() {
  if (!at_end()) fail({"end of line"});
}

SourceSpan Cursor::span(const Token& t) const { return {file_, line_.number, t.column, t.column_end}; }

void Cursor::fail(std::vector<std::string> expected) const {
  const auto& t = peek();
  std::string message = "expected " + join(expected) + ", found " + describe(t);
  throw SyntaxError{{span(t), std::move(message), std::move(expected)}};
}

void Cursor::fail_at(const Token& t, std::string message) const {
  throw SyntaxError{{span(t), std::move(message), {}}};
}

Value Cursor::literal() {
  if (peek().kind == Tok::text) return next().text;
  const bool negative = accept("-");
  const auto v = integer(negative ? "number" : "number or string");
  return negative ? -v : v;
}

Expr Cursor::expr() {
  Expr lhs = term();
  while (is("+") || is("-")) {
    const auto k = next().text == "+" ? Expr::Kind::add : Expr::Kind::sub;
    lhs = Expr::binary(k, std::move(lhs), term());
  }
  return lhs;
}

Expr Cursor::term() {
  Expr lhs = factor();
  while (is("*") || is("/")) {
    const auto k = next().text == "*" ? Expr::Kind::mul : Expr::Kind::div;
    lhs = Expr::binary(k, std::move(lhs), factor());
  }
  return lhs;
}

Expr Cursor::factor() {
  const auto& t = peek();
  if (accept("(")) {
    Expr e = expr();
    expect(")");
    return e;
  }
  if (t.kind == Tok::integer || t.kind == Tok::text || (t.kind == Tok::symbol && t.text == "-")) {
    return Expr::lit(literal());
  }
  if (t.kind != Tok::ident) fail({"expression"});
  if ((t.text == "sum" || t.text == "size") && peek(1).kind == Tok::symbol && peek(1).text == "(") {
    const bool is_sum = next().text == "sum";
    next();
    auto head = ident(is_sum ? "name" : "store name");
    std::string attr;
    if (is_sum && accept(".")) attr = ident("attribute");
    expect(")");
    return is_sum ? Expr::sum_of(std::move(head), std::move(attr)) : Expr::size_of(std::move(head));
  }
  auto head = ident("name");
  std::string attr;
  if (accept(".")) attr = ident("attribute");
  return Expr::ref(std::move(head), std::move(attr));
}

Guard Cursor::guard() {
  Guard g;
  g.lhs = expr();
  const auto& t = peek();
  const auto op = t.kind == Tok::symbol ? parse_cmp_op(t.text) : std::nullopt;
  if (!op) fail({"comparison operator"});
  next();
  g.op = *op;
  g.rhs = expr();
  return g;
}

ThingTemplate Cursor::thing_template() {
  ThingTemplate t;
  t.type = ident("thing name");
  expect("(");
  if (!accept(")")) {
    do {
      auto attr = ident("attribute");
      expect("=");
      t.attrs.emplace_back(std::move(attr), expr());
    } while (accept(","));
    expect(")");
  }
  return t;
}

}  // namespace tmkit::dsl
