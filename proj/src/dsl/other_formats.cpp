#include <algorithm>
#include <set>

#include "lexer.hpp"

namespace tmkit {

using dsl::Cursor;
using dsl::SyntaxError;
using dsl::Tok;

namespace {

template <typename Fn>
ParseErrors each_line(std::string_view text, const std::string& file, Fn&& fn) {
  ParseErrors errors;
  const auto lines = dsl::lex(text, file, errors);
  for (const auto& line : lines) {
    Cursor c(line, file);
    try {
      fn(c);
    } catch (const SyntaxError& e) {
      errors.push_back(e.error);
    }
  }
  std::stable_sort(errors.begin(), errors.end(),
                   [](const ParseError& a, const ParseError& b) { return a.span.line < b.span.line; });
  return errors;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string quote(const std::string& s) { return to_string(Value{s}); }

}  // namespace

// ---------------------------------------------------------------------------
// events

Expected<EventsModel, ParseErrors> parse_events(std::string_view text, const StaticModel& model,
                                                const std::string& file) {
  std::vector<Event> events;
  std::set<std::string> names;
  auto errors = each_line(text, file, [&](Cursor& c) {
    c.expect("event");
    const auto& name_tok = c.peek();
    Event e;
    e.name = c.ident("event name");
    if (names.count(e.name)) c.fail_at(name_tok, "duplicate event '" + e.name + "'");
    e.description = c.text("description string");
    const auto& nodes_tok = c.peek();
    c.expect("nodes");
    if (c.peek().kind == Tok::ident && c.peek().text != "time") {
      do {
        const auto& t = c.peek();
        auto id = c.ident("node id");
        if (!model.node(id)) c.fail_at(t, "event " + e.name + " names unknown node '" + id + "'");
        e.region.push_back(std::move(id));
      } while (c.accept(","));
    }
    if (e.region.empty()) c.fail_at(nodes_tok, "event " + e.name + " has an empty region");
    if (c.accept("time")) e.time = c.text("time string");
    c.finish();
    names.insert(e.name);
    events.push_back(std::move(e));
  });
  if (!errors.empty()) return unexpected(std::move(errors));
  return EventsModel(model, std::move(events));
}

std::string serialize_events(const std::vector<Event>& events) {
  std::string out;
  for (const auto& e : events) {
    out += "event " + e.name + " " + quote(e.description) + " nodes ";
    for (std::size_t i = 0; i < e.region.size(); ++i) out += (i ? ", " : "") + e.region[i];
    if (e.time) out += " time " + quote(*e.time);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// groupings

Expected<std::vector<SuperEvent>, ParseErrors> parse_groups(std::string_view text, const std::string& file) {
  std::vector<SuperEvent> groups;
  auto errors = each_line(text, file, [&](Cursor& c) {
    c.expect("super");
    const auto& first = c.peek();
    while (!c.at_end() && !c.is(":")) c.next();
    const auto& colon = c.peek();
    if (colon.kind == Tok::end) c.fail({"':'"});
    SuperEvent g;
    g.name = trim(c.line().raw.substr(first.column - 1, colon.column - first.column));
    if (g.name.empty()) c.fail_at(colon, "super-event needs a name");
    c.next();
    if (!c.at_end()) {
      do {
        g.members.push_back(c.ident("event name"));
      } while (c.accept(","));
    }
    c.finish();
    groups.push_back(std::move(g));
  });
  if (!errors.empty()) return unexpected(std::move(errors));
  return groups;
}

std::string serialize_groups(const std::vector<SuperEvent>& groups) {
  std::string out;
  for (const auto& g : groups) {
    out += "super " + g.name + ":";
    for (std::size_t i = 0; i < g.members.size(); ++i) out += (i ? ", " : " ") + g.members[i];
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// scenarios

namespace {

std::int64_t signed_int(Cursor& c) {
  const bool negative = c.accept("-");
  const auto v = c.integer("number");
  return negative ? -v : v;
}

Generator generator(Cursor& c) {
  Generator g;
  g.name = c.ident("generator name");
  if (c.accept("from")) {
    const auto head = c.ident("store or scenario name");
    if (c.accept(".")) {
      g.kind = Generator::Kind::upstream;
      g.upstream_scenario = head;
      g.upstream_output = c.ident("output name");
    } else {
      g.kind = Generator::Kind::store;
      g.store = head;
    }
  } else if (c.accept("multiset")) {
    g.kind = Generator::Kind::multiset;
    c.expect("{");
    do {
      auto element = c.ident("element name");
      c.expect("=");
      g.elements.emplace_back(std::move(element), signed_int(c));
    } while (c.accept(","));
    c.expect("}");
    c.expect("size");
    g.lo = signed_int(c);
    c.expect("..");
    g.hi = signed_int(c);
  } else if (c.accept("in")) {
    if (c.accept("{")) {
      g.kind = Generator::Kind::values;
      if (!c.accept("}")) {
        do {
          g.values.push_back(c.literal());
        } while (c.accept(","));
        c.expect("}");
      }
    } else {
      g.kind = Generator::Kind::range;
      g.lo = signed_int(c);
      c.expect("..");
      g.hi = signed_int(c);
    }
  } else {
    c.fail({"'in'", "'from'", "'multiset'"});
  }
  return g;
}

Assertion assertion(Cursor& c) {
  Assertion a;
  if (c.accept("if")) {
    a.when = c.guard();
    c.expect(":");
  }
  if (c.accept("fires")) {
    a.kind = Assertion::Kind::fires;
    a.target = c.ident("node or event");
    if (c.accept("with")) {
      do {
        const auto& t = c.peek();
        auto type = c.ident("thing name");
        if (!a.with_type.empty() && type != a.with_type) c.fail_at(t, "all 'with' checks must name one thing");
        a.with_type = type;
        c.expect(".");
        auto attr = c.ident("attribute");
        c.expect("=");
        a.with.emplace_back(std::move(attr), c.expr());
      } while (c.accept(","));
    }
  } else if (c.accept("never")) {
    a.kind = Assertion::Kind::never;
    a.target = c.ident("node or event");
  } else if (c.accept("count")) {
    a.kind = Assertion::Kind::count;
    a.target = c.ident("node or event");
    if (!c.accept("<=") && !c.accept("≤")) c.fail({"'<='"});
    a.bound = c.expr();
  } else if (c.accept("store")) {
    a.store = c.ident("store name");
    if (c.accept("size")) {
      a.kind = Assertion::Kind::store_size;
      c.expect("=");
      a.bound = c.expr();
    } else if (c.accept("only")) {
      a.kind = Assertion::Kind::store_only;
      a.only = c.thing_template();
    } else {
      c.fail({"'size'", "'only'"});
    }
  } else {
    c.fail({"'fires'", "'never'", "'count'", "'store'"});
  }
  return a;
}

}  // namespace

Expected<std::vector<Scenario>, ParseErrors> parse_scenarios(std::string_view text, const std::string& file) {
  std::vector<Scenario> out;
  std::set<std::string> names;
  auto errors = each_line(text, file, [&](Cursor& c) {
    const auto& kw = c.peek();
    if (c.accept("scenario")) {
      const auto& t = c.peek();
      Scenario s;
      s.name = c.ident("scenario name");
      if (names.count(s.name)) c.fail_at(t, "duplicate scenario '" + s.name + "'");
      c.finish();
      names.insert(s.name);
      out.push_back(std::move(s));
      return;
    }
    if (out.empty()) c.fail({"'scenario'"});
    auto& s = out.back();
    if (c.accept("target")) {
      s.target = trim(c.line().raw.substr(c.peek().column - 1));
      if (c.at_end()) c.fail({"super-event name"});
      return;
    }
    if (c.accept("max_steps")) {
      s.max_steps = static_cast<std::size_t>(c.integer("step budget"));
    } else if (c.accept("let")) {
      s.generators.push_back(generator(c));
    } else if (c.accept("inject")) {
      InjectionTemplate inj;
      inj.node = c.ident("node id");
      inj.thing = c.thing_template();
      s.injections.push_back(std::move(inj));
    } else if (c.accept("expect")) {
      s.assertions.push_back(assertion(c));
    } else if (c.accept("output")) {
      OutputSpec o;
      o.name = c.ident("output name");
      c.expect("=");
      o.node = c.ident("node id");
      o.type = c.ident("thing name");
      c.expect(".");
      o.attr = c.ident("attribute");
      s.outputs.push_back(std::move(o));
    } else {
      c.fail_at(kw, "expected 'target', 'max_steps', 'let', 'inject', 'expect', or 'output', found " +
                        dsl::describe(kw));
    }
    c.finish();
  });
  if (!errors.empty()) return unexpected(std::move(errors));
  return out;
}

namespace {

std::string generator_text(const Generator& g) {
  std::string out = "let " + g.name;
  switch (g.kind) {
    case Generator::Kind::values:
      out += " in {";
      for (std::size_t i = 0; i < g.values.size(); ++i) out += (i ? ", " : "") + to_string(g.values[i]);
      return out + "}";
    case Generator::Kind::range:
      return out + " in " + std::to_string(g.lo.value_or(0)) + ".." + std::to_string(g.hi.value_or(0));
    case Generator::Kind::store:
      return out + " from " + g.store;
    case Generator::Kind::upstream:
      return out + " from " + g.upstream_scenario + "." + g.upstream_output;
    case Generator::Kind::multiset:
      out += " multiset {";
      for (std::size_t i = 0; i < g.elements.size(); ++i) {
        out += (i ? ", " : "") + g.elements[i].first + " = " + std::to_string(g.elements[i].second);
      }
      return out + "} size " + std::to_string(g.lo.value_or(0)) + ".." + std::to_string(g.hi.value_or(0));
  }
  return out;
}

}  // namespace

std::string serialize_scenarios(const std::vector<Scenario>& scenarios) {
  std::string out;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const auto& s = scenarios[k];
    if (k) out += "\n";
    out += "scenario " + s.name + "\n";
    if (!s.target.empty()) out += "target " + s.target + "\n";
    out += "max_steps " + std::to_string(s.max_steps) + "\n";
    for (const auto& g : s.generators) out += generator_text(g) + "\n";
    for (const auto& inj : s.injections) {
      out += "inject " + inj.node + " " + inj.thing.type + "(";
      for (std::size_t i = 0; i < inj.thing.attrs.size(); ++i) {
        out += (i ? ", " : "") + inj.thing.attrs[i].first + " = " + to_string(inj.thing.attrs[i].second);
      }
      out += ")\n";
    }
    for (const auto& a : s.assertions) out += "expect " + to_string(a) + "\n";
    for (const auto& o : s.outputs) out += "output " + o.name + " = " + o.node + " " + o.type + "." + o.attr + "\n";
  }
  return out;
}

}  // namespace tmkit
