#include <algorithm>

#include "lexer.hpp"

namespace tmkit {

using dsl::Cursor;
using dsl::SyntaxError;
using dsl::Tok;

std::string to_string(const ParseError& e) {
  return e.span.file + ":" + std::to_string(e.span.line) + ":" + std::to_string(e.span.column_start) + ": " +
         e.message;
}

void SourceMap::mention(const std::string& name, SourceSpan span) { mentions_[name].push_back(std::move(span)); }

SourceSpan SourceMap::locate(const Diagnostic& d) const {
  if (d.span.line != 0) return d.span;
  const auto it = mentions_.find(d.subject);
  if (it == mentions_.end() || it->second.empty()) return {file_, 1, 1, 1};
  return d.code == "duplicate id" ? it->second.back() : it->second.front();
}

void SourceMap::locate(Diagnostics& diags) const {
  for (auto& d : diags) d.span = locate(d);
}

Diagnostics to_diagnostics(const ParseErrors& errors) {
  Diagnostics out;
  for (const auto& e : errors) out.push_back({"syntax error", e.message, {}, e.span});
  return out;
}

namespace {

ActionKind node_kind(Cursor& c) {
  const auto& t = c.peek();
  if (t.kind == Tok::ident) {
    if (t.text == "transfer") {
      c.next();
      if (c.accept("in")) return ActionKind::transfer_in;
      if (c.accept("out")) return ActionKind::transfer_out;
      c.fail({"'in'", "'out'"});
    }
    if (auto k = parse_action_kind(t.text)) {
      c.next();
      return *k;
    }
  }
  c.fail({"'create'", "'process'", "'release'", "'transfer'", "'receive'"});
}

EffectStmt effect_stmt(Cursor& c) {
  EffectStmt s;
  if (c.accept("set")) {
    s.kind = EffectStmt::Kind::set;
    s.attr = c.ident("attribute");
    c.expect("=");
    s.value = c.expr();
  } else if (c.accept("pop")) {
    s.kind = EffectStmt::Kind::pop;
    s.store = c.ident("store name");
  } else if (c.accept("emit")) {
    s.kind = EffectStmt::Kind::emit;
    s.thing = c.thing_template();
  } else if (c.accept("append")) {
    s.kind = EffectStmt::Kind::append;
    s.store = c.ident("store name");
    if (c.peek().kind == Tok::ident && c.peek().text != "x") s.thing = c.thing_template();
    if (c.accept("x")) s.times = c.expr();
  } else {
    c.fail({"'set'", "'pop'", "'emit'", "'append'"});
  }
  return s;
}

// Edges are diagnosed under "from->to"; point those at the whole line.
void mention_line(const Cursor& c, const std::string& key) {
  if (!c.map) return;
  const auto& line = c.line();
  c.map->mention(key, {c.span(line.tokens.front()).file, line.number, 1, static_cast<int>(line.raw.size())});
}

void parse_line(Cursor& c, ModelDecl& m) {
  const auto& kw = c.peek();
  if (kw.kind != Tok::ident) c.fail({"declaration"});
  const std::string word = kw.text;
  if (word == "model") {
    c.next();
    m.name = c.ident("model name");
  } else if (word == "thing") {
    c.next();
    ThingDecl t;
    t.name = c.ident("thing name");
    if (c.accept("attrs")) {
      do {
        AttrDecl a;
        a.name = c.ident("attribute");
        c.expect(":");
        if (c.accept("int")) {
          a.type = ValueType::integer;
        } else if (c.accept("text")) {
          a.type = ValueType::text;
        } else {
          c.fail({"'int'", "'text'"});
        }
        t.attrs.push_back(std::move(a));
      } while (c.accept(","));
    }
    c.finish();
    m.things.push_back(std::move(t));
  } else if (word == "thimac") {
    c.next();
    Thimac t;
    t.name = c.ident("thimac name");
    if (c.accept("in")) t.parent = c.ident("parent thimac");
    if (c.accept("store")) t.is_store = true;
    c.finish();
    m.thimacs.push_back(std::move(t));
  } else if (word == "item") {
    c.next();
    const auto& store_tok = c.peek();
    const auto store = c.ident("store name");
    auto it = std::find_if(m.thimacs.begin(), m.thimacs.end(), [&](const Thimac& t) { return t.name == store; });
    if (it == m.thimacs.end()) c.fail_at(store_tok, "unknown store '" + store + "'");
    if (!it->is_store) c.fail_at(store_tok, "thimac '" + store + "' is not a store");
    ThingInstance item;
    item.type = c.ident("thing name");
    c.expect("(");
    if (!c.accept(")")) {
      do {
        const auto& attr_tok = c.peek();
        auto attr = c.ident("attribute");
        c.expect("=");
        if (item.attrs.count(attr)) c.fail_at(attr_tok, "attribute '" + attr + "' given twice");
        item.attrs[attr] = c.literal();
      } while (c.accept(","));
      c.expect(")");
    }
    std::int64_t times = 1;
    if (c.accept("x")) times = c.integer("count");
    c.finish();
    for (std::int64_t i = 0; i < times; ++i) it->store_contents.push_back(item);
  } else if (word == "node") {
    c.next();
    ActionNode n;
    n.id = c.ident("node id");
    c.expect(":");
    n.kind = node_kind(c);
    n.thing = c.ident("thing name");
    c.expect("in");
    n.thimac = c.ident("thimac name");
    if (c.accept("input")) n.input = true;
    if (c.accept("effect")) {
      c.expect("{");
      while (!c.accept("}")) {
        n.effect.push_back(effect_stmt(c));
        if (!c.accept(";")) {
          c.expect("}");
          break;
        }
      }
    }
    c.finish();
    m.nodes.push_back(std::move(n));
  } else if (word == "flow") {
    c.next();
    FlowEdge f;
    f.from = c.ident("node id");
    c.expect("->");
    f.to = c.ident("node id");
    c.finish();
    mention_line(c, f.from + "->" + f.to);
    m.flows.push_back(std::move(f));
  } else if (word == "trigger") {
    c.next();
    TriggerEdge t;
    t.from = c.ident("node id");
    c.expect("->");
    t.to = c.ident("node id");
    if (c.accept("when")) {
      t.guard = c.guard();
    } else if (c.accept("else")) {
      t.otherwise = true;
    }
    c.finish();
    mention_line(c, t.from + "->" + t.to);
    m.triggers.push_back(std::move(t));
  } else {
    c.fail({"'model'", "'thing'", "'thimac'", "'item'", "'node'", "'flow'", "'trigger'"});
  }
}

std::string kind_word(ActionKind k) { return to_string(k); }

}  // namespace

Expected<ModelDecl, ParseErrors> parse_model_decl(std::string_view text, const std::string& file, SourceMap* map) {
  ParseErrors errors;
  const auto lines = dsl::lex(text, file, errors);
  ModelDecl m;
  for (const auto& line : lines) {
    Cursor c(line, file);
    c.map = map;
    try {
      parse_line(c, m);
    } catch (const SyntaxError& e) {
      errors.push_back(e.error);
    }
  }
  if (!errors.empty()) {
    std::stable_sort(errors.begin(), errors.end(),
                     [](const ParseError& a, const ParseError& b) { return a.span.line < b.span.line; });
    return unexpected(std::move(errors));
  }
  return m;
}

Expected<StaticModel, ParseErrors> parse_model(std::string_view text, const std::string& file, SourceMap* map) {
  SourceMap local(file);
  if (!map) map = &local;
  auto decl = parse_model_decl(text, file, map);
  if (!decl) return unexpected(decl.error());
  auto model = build_model(std::move(*decl));
  if (!model) {
    auto diags = model.error();
    map->locate(diags);
    ParseErrors errors;
    for (const auto& d : diags) errors.push_back({d.span, d.code + ": " + d.message, {}});
    return unexpected(std::move(errors));
  }
  return std::move(*model);
}

std::string serialize_model(const ModelDecl& m) {
  std::string out;
  if (!m.name.empty()) out += "model " + m.name + "\n";
  for (const auto& t : m.things) {
    out += "thing " + t.name;
    for (std::size_t i = 0; i < t.attrs.size(); ++i) {
      out += (i ? ", " : " attrs ") + t.attrs[i].name + ":" + to_string(t.attrs[i].type);
    }
    out += "\n";
  }
  for (const auto& t : m.thimacs) {
    out += "thimac " + t.name;
    if (t.parent) out += " in " + *t.parent;
    if (t.is_store) out += " store";
    out += "\n";
    for (const auto& item : t.store_contents) out += "item " + t.name + " " + to_string(item) + "\n";
  }
  for (const auto& n : m.nodes) {
    out += "node " + n.id + ": " + kind_word(n.kind) + " " + n.thing + " in " + n.thimac;
    if (n.input) out += " input";
    if (!n.effect.empty()) {
      out += " effect { ";
      for (std::size_t i = 0; i < n.effect.size(); ++i) out += (i ? "; " : "") + to_string(n.effect[i]);
      out += " }";
    }
    out += "\n";
  }
  for (const auto& f : m.flows) out += "flow " + f.from + " -> " + f.to + "\n";
  for (const auto& t : m.triggers) {
    out += "trigger " + t.from + " -> " + t.to;
    if (t.guard) out += " when " + to_string(*t.guard);
    if (t.otherwise) out += " else";
    out += "\n";
  }
  return out;
}

std::string serialize_model(const StaticModel& model) { return serialize_model(model.decl()); }

}  // namespace tmkit
