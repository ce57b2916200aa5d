#include "tmkit/core/model.hpp"

#include <algorithm>
#include <set>

namespace tmkit {

Stage stage_of(ActionKind k) {
  switch (k) {
    case ActionKind::create:
      return Stage::create;
    case ActionKind::process:
      return Stage::process;
    case ActionKind::release:
      return Stage::release;
    case ActionKind::transfer_in:
    case ActionKind::transfer_out:
      return Stage::transfer;
    case ActionKind::receive:
      return Stage::receive;
  }
  return Stage::process;
}

bool is_transfer(ActionKind k) { return stage_of(k) == Stage::transfer; }

std::string to_string(ActionKind k) {
  switch (k) {
    case ActionKind::create:
      return "create";
    case ActionKind::process:
      return "process";
    case ActionKind::release:
      return "release";
    case ActionKind::transfer_in:
      return "transfer in";
    case ActionKind::transfer_out:
      return "transfer out";
    case ActionKind::receive:
      return "receive";
  }
  return "?";
}

std::optional<ActionKind> parse_action_kind(std::string_view stage, std::string_view direction) {
  if (stage == "transfer") {
    if (direction == "in") return ActionKind::transfer_in;
    if (direction == "out") return ActionKind::transfer_out;
    return std::nullopt;
  }
  if (!direction.empty()) return std::nullopt;
  if (stage == "create") return ActionKind::create;
  if (stage == "process") return ActionKind::process;
  if (stage == "release") return ActionKind::release;
  if (stage == "receive") return ActionKind::receive;
  return std::nullopt;
}

const AttrDecl* ThingDecl::attr(std::string_view n) const {
  for (const auto& a : attrs) {
    if (a.name == n) return &a;
  }
  return nullptr;
}

std::string to_string(const EffectStmt& s) {
  auto templ = [](const ThingTemplate& t) {
    std::string out = t.type + "(";
    for (std::size_t i = 0; i < t.attrs.size(); ++i) {
      if (i) out += ", ";
      out += t.attrs[i].first + " = " + to_string(t.attrs[i].second);
    }
    return out + ")";
  };
  switch (s.kind) {
    case EffectStmt::Kind::set:
      return "set " + s.attr + " = " + to_string(s.value);
    case EffectStmt::Kind::pop:
      return "pop " + s.store;
    case EffectStmt::Kind::emit:
      return "emit " + templ(*s.thing);
    case EffectStmt::Kind::append: {
      std::string out = "append " + s.store;
      if (s.thing) out += " " + templ(*s.thing);
      if (s.times) out += " x " + to_string(*s.times);
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// StaticModel

const ActionNode* StaticModel::node(std::string_view id) const {
  const auto it = node_index_.find(id);
  return it == node_index_.end() ? nullptr : &decl_.nodes[it->second];
}

const Thimac* StaticModel::thimac(std::string_view name) const {
  const auto it = thimac_index_.find(name);
  return it == thimac_index_.end() ? nullptr : &decl_.thimacs[it->second];
}

const ThingDecl* StaticModel::thing(std::string_view name) const {
  const auto it = thing_index_.find(name);
  return it == thing_index_.end() ? nullptr : &decl_.things[it->second];
}

namespace {

const std::vector<std::size_t>& empty_list() {
  static const std::vector<std::size_t> empty;
  return empty;
}

}  // namespace

const std::vector<std::size_t>& StaticModel::flows_into(std::string_view id) const {
  const auto it = adjacency_.find(id);
  return it == adjacency_.end() ? empty_list() : it->second.flows_in;
}

const std::vector<std::size_t>& StaticModel::flows_out_of(std::string_view id) const {
  const auto it = adjacency_.find(id);
  return it == adjacency_.end() ? empty_list() : it->second.flows_out;
}

const std::vector<std::size_t>& StaticModel::triggers_into(std::string_view id) const {
  const auto it = adjacency_.find(id);
  return it == adjacency_.end() ? empty_list() : it->second.triggers_in;
}

const std::vector<std::size_t>& StaticModel::triggers_out_of(std::string_view id) const {
  const auto it = adjacency_.find(id);
  return it == adjacency_.end() ? empty_list() : it->second.triggers_out;
}

std::string StaticModel::output_type(const ActionNode& n) const {
  for (const auto& s : n.effect) {
    if (s.kind == EffectStmt::Kind::emit && s.thing) return s.thing->type;
  }
  return n.thing;
}

// ---------------------------------------------------------------------------
// build_model

namespace {

struct Resolver {
  const ModelDecl& decl;
  std::map<std::string, const ThingDecl*, std::less<>> things;
  std::map<std::string, const Thimac*, std::less<>> thimacs;
  Diagnostics& out;

  void error(std::string code, std::string message, std::string subject) {
    out.push_back({std::move(code), std::move(message), std::move(subject), {}});
  }

  void check_paths(const Expr& e, const std::string& where) {
    std::vector<std::pair<std::string, std::string>> paths;
    collect_paths(e, paths);
    for (const auto& [head, attr] : paths) {
      const auto it = things.find(head);
      if (it == things.end()) {
        error("unknown thing", where + ": expression refers to undeclared thing '" + head + "'",
              head);
      } else if (attr.empty() || !it->second->attr(attr)) {
        error("unknown attribute",
              where + ": thing '" + head + "' has no attribute '" + attr + "'", head + "." + attr);
      }
    }
    check_stores(e, where);
  }

  void check_stores(const Expr& e, const std::string& where) {
    if (e.kind == Expr::Kind::sum || e.kind == Expr::Kind::size) check_store(e.head, where);
    for (const auto& a : e.args) check_stores(a, where);
  }

  void check_store(const std::string& name, const std::string& where) {
    const auto it = thimacs.find(name);
    if (it == thimacs.end()) {
      error("unknown store", where + ": no thimac named '" + name + "'", name);
    } else if (!it->second->is_store) {
      error("not a store", where + ": thimac '" + name + "' is not a store", name);
    }
  }

  void check_template(const ThingTemplate& t, const std::string& where) {
    const auto it = things.find(t.type);
    if (it == things.end()) {
      error("unknown thing", where + ": undeclared thing '" + t.type + "'", t.type);
      return;
    }
    for (const auto& [attr, value] : t.attrs) {
      if (!it->second->attr(attr)) {
        error("unknown attribute", where + ": thing '" + t.type + "' has no attribute '" + attr + "'",
              t.type + "." + attr);
      }
      check_paths(value, where);
    }
  }
};

bool has_parent_cycle(const std::map<std::string, const Thimac*, std::less<>>& thimacs,
                      const Thimac& start) {
  std::set<std::string> seen{start.name};
  const Thimac* cur = &start;
  while (cur->parent) {
    const auto it = thimacs.find(*cur->parent);
    if (it == thimacs.end()) return false;
    if (!seen.insert(it->second->name).second) return true;
    cur = it->second;
  }
  return false;
}

}  // namespace

Expected<StaticModel, Diagnostics> build_model(ModelDecl decl) {
  Diagnostics errors;
  Resolver r{decl, {}, {}, errors};

  for (const auto& t : decl.things) {
    if (!r.things.emplace(t.name, &t).second) {
      r.error("duplicate id", "thing '" + t.name + "' declared twice", t.name);
    }
    std::set<std::string> attrs;
    for (const auto& a : t.attrs) {
      if (!attrs.insert(a.name).second) {
        r.error("duplicate id", "thing '" + t.name + "' repeats attribute '" + a.name + "'",
                t.name + "." + a.name);
      }
    }
  }
  for (const auto& m : decl.thimacs) {
    if (!r.thimacs.emplace(m.name, &m).second) {
      r.error("duplicate id", "thimac '" + m.name + "' declared twice", m.name);
    }
  }
  for (const auto& m : decl.thimacs) {
    if (m.parent && !r.thimacs.count(*m.parent)) {
      r.error("dangling reference", "thimac '" + m.name + "' is nested in unknown thimac '" +
                                        *m.parent + "'",
              *m.parent);
    } else if (has_parent_cycle(r.thimacs, m)) {
      r.error("nesting cycle", "thimac '" + m.name + "' is its own ancestor", m.name);
    }
    if (!m.is_store && !m.store_contents.empty()) {
      r.error("contents on non-store", "thimac '" + m.name + "' holds items but is not a store",
              m.name);
    }
    for (const auto& item : m.store_contents) {
      const auto it = r.things.find(item.type);
      if (it == r.things.end()) {
        r.error("unknown thing", "store '" + m.name + "' holds undeclared thing '" + item.type + "'",
                item.type);
        continue;
      }
      for (const auto& [k, v] : item.attrs) {
        const auto* a = it->second->attr(k);
        if (!a) {
          r.error("unknown attribute", "store item " + to_string(item) + " has unknown attribute '" +
                                           k + "'",
                  item.type + "." + k);
        } else if (a->type != type_of(v)) {
          r.error("type mismatch", "store item " + to_string(item) + ": '" + k + "' should be " +
                                       to_string(a->type),
                  item.type + "." + k);
        }
      }
    }
  }

  std::set<std::string> ids;
  for (const auto& n : decl.nodes) {
    if (!ids.insert(n.id).second) {
      r.error("duplicate id", "node '" + n.id + "' declared twice", n.id);
    }
    if (!r.thimacs.count(n.thimac)) {
      r.error("dangling reference", "node '" + n.id + "' is in unknown thimac '" + n.thimac + "'",
              n.thimac);
    }
    if (!r.things.count(n.thing)) {
      r.error("dangling reference", "node '" + n.id + "' handles undeclared thing '" + n.thing + "'",
              n.thing);
    }
    if (n.input && n.kind != ActionKind::create) {
      r.error("input on illegal kind", "node '" + n.id + "': only create nodes take input", n.id);
    }
    if (!n.effect.empty() && n.kind != ActionKind::create && n.kind != ActionKind::process) {
      r.error("effect on illegal kind",
              "node '" + n.id + "' is a " + to_string(n.kind) + "; effects belong to create/process",
              n.id);
      continue;
    }
    const std::string where = "node '" + n.id + "'";
    int emits = 0;
    for (const auto& s : n.effect) {
      switch (s.kind) {
        case EffectStmt::Kind::set: {
          const auto it = r.things.find(n.thing);
          if (it != r.things.end() && !it->second->attr(s.attr)) {
            r.error("unknown attribute",
                    where + ": thing '" + n.thing + "' has no attribute '" + s.attr + "'",
                    n.thing + "." + s.attr);
          }
          r.check_paths(s.value, where);
          break;
        }
        case EffectStmt::Kind::pop:
          r.check_store(s.store, where);
          break;
        case EffectStmt::Kind::append:
          r.check_store(s.store, where);
          if (s.thing) r.check_template(*s.thing, where);
          if (s.times) r.check_paths(*s.times, where);
          break;
        case EffectStmt::Kind::emit:
          ++emits;
          r.check_template(*s.thing, where);
          break;
      }
    }
    if (emits > 1) r.error("multiple emits", where + " emits more than one thing", n.id);
  }

  auto endpoint = [&](const std::string& id, const std::string& what) {
    if (!ids.count(id)) {
      r.error("dangling reference", what + " refers to unknown node '" + id + "'", id);
    }
  };
  for (const auto& f : decl.flows) {
    endpoint(f.from, "flow " + f.from + " -> " + f.to);
    endpoint(f.to, "flow " + f.from + " -> " + f.to);
  }
  for (const auto& t : decl.triggers) {
    endpoint(t.from, "trigger " + t.from + " -> " + t.to);
    endpoint(t.to, "trigger " + t.from + " -> " + t.to);
    if (t.guard && t.otherwise) {
      r.error("guard conflict", "trigger " + t.from + " -> " + t.to + " has both a guard and else",
              t.from);
    }
  }

  if (!errors.empty()) return unexpected(std::move(errors));

  StaticModel m;
  m.decl_ = std::move(decl);
  for (std::size_t i = 0; i < m.decl_.nodes.size(); ++i) {
    m.node_index_.emplace(m.decl_.nodes[i].id, i);
    m.adjacency_[m.decl_.nodes[i].id];
  }
  for (std::size_t i = 0; i < m.decl_.thimacs.size(); ++i) {
    m.thimac_index_.emplace(m.decl_.thimacs[i].name, i);
  }
  for (std::size_t i = 0; i < m.decl_.things.size(); ++i) {
    m.thing_index_.emplace(m.decl_.things[i].name, i);
  }
  for (std::size_t i = 0; i < m.decl_.flows.size(); ++i) {
    m.adjacency_[m.decl_.flows[i].from].flows_out.push_back(i);
    m.adjacency_[m.decl_.flows[i].to].flows_in.push_back(i);
  }
  for (std::size_t i = 0; i < m.decl_.triggers.size(); ++i) {
    m.adjacency_[m.decl_.triggers[i].from].triggers_out.push_back(i);
    m.adjacency_[m.decl_.triggers[i].to].triggers_in.push_back(i);
  }
  return m;
}

// ---------------------------------------------------------------------------
// legality

bool flow_is_legal(ActionKind from, ActionKind to, bool same_thimac) {
  using K = ActionKind;
  if (!same_thimac) return from == K::transfer_out && to == K::transfer_in;
  switch (from) {
    case K::create:
    case K::receive:
      return to == K::process || to == K::release;
    case K::process:
      return to == K::release;
    case K::release:
      return to == K::transfer_out;
    case K::transfer_in:
      return to == K::receive;
    case K::transfer_out:
      return false;
  }
  return false;
}

bool trigger_source_is_legal(ActionKind k) {
  return k == ActionKind::create || k == ActionKind::process;
}

bool trigger_target_is_legal(ActionKind k) { return k != ActionKind::receive; }

namespace {

std::optional<ValueType> expr_type(const StaticModel& m, const Expr& e, std::string& problem) {
  switch (e.kind) {
    case Expr::Kind::literal:
      return type_of(e.literal);
    case Expr::Kind::path: {
      const auto* t = m.thing(e.head);
      if (!t) {
        problem = "undeclared thing '" + e.head + "'";
        return std::nullopt;
      }
      const auto* a = t->attr(e.attr);
      if (!a) {
        problem = "thing '" + e.head + "' has no attribute '" + e.attr + "'";
        return std::nullopt;
      }
      return a->type;
    }
    case Expr::Kind::sum:
    case Expr::Kind::size:
      return ValueType::integer;
    default: {
      const auto l = expr_type(m, e.args[0], problem);
      const auto r = expr_type(m, e.args[1], problem);
      if (!l || !r) return std::nullopt;
      if (*l == ValueType::text && *r == ValueType::text && e.kind == Expr::Kind::add) {
        return ValueType::text;
      }
      if (*l != ValueType::integer || *r != ValueType::integer) {
        problem = "arithmetic on text";
        return std::nullopt;
      }
      return ValueType::integer;
    }
  }
}

}  // namespace

Diagnostics check_static(const StaticModel& model) {
  Diagnostics out;
  auto add = [&](std::string code, std::string message, std::string subject) {
    out.push_back({std::move(code), std::move(message), std::move(subject), {}});
  };

  for (const auto& f : model.flows()) {
    const auto* a = model.node(f.from);
    const auto* b = model.node(f.to);
    const bool same = a->thimac == b->thimac;
    if (!flow_is_legal(a->kind, b->kind, same)) {
      add("illegal stage succession",
          "flow " + f.from + " -> " + f.to + ": " + to_string(a->kind) + " -> " +
              to_string(b->kind) + (same ? " within " + a->thimac
                                         : " across " + a->thimac + "/" + b->thimac),
          f.from + "->" + f.to);
    }
  }

  for (const auto& t : model.triggers()) {
    const auto* a = model.node(t.from);
    const auto* b = model.node(t.to);
    const std::string label = "trigger " + t.from + " -> " + t.to;
    if (!trigger_source_is_legal(a->kind)) {
      add("illegal trigger source", label + ": source is a " + to_string(a->kind), t.from);
    }
    if (!trigger_target_is_legal(b->kind)) {
      add("illegal trigger target", label + ": target is a " + to_string(b->kind), t.to);
    }
    if (t.guard) {
      std::string problem;
      const auto l = expr_type(model, t.guard->lhs, problem);
      const auto r = expr_type(model, t.guard->rhs, problem);
      if (!l || !r) {
        add("ill-formed guard", label + ": " + problem, t.from);
      } else if (*l != *r) {
        add("ill-typed guard", label + ": compares " + to_string(*l) + " with " + to_string(*r),
            t.from);
      }
    }
  }

  for (const auto& n : model.nodes()) {
    if (n.kind != ActionKind::transfer_out) continue;
    const auto& outs = model.flows_out_of(n.id);
    const bool matched = std::any_of(outs.begin(), outs.end(), [&](std::size_t i) {
      return model.node(model.flows()[i].to)->kind == ActionKind::transfer_in;
    });
    if (!matched) {
      add("unmatched transfer", "transfer out '" + n.id + "' has no matching transfer in", n.id);
    }
  }
  return out;
}

bool is_joint_capable(const StaticModel& model, StaticEdgeRef e) {
  if (e.kind == StaticEdgeRef::Kind::trigger) return true;
  const auto& f = model.flows()[e.index];
  return is_transfer(model.node(f.from)->kind) || is_transfer(model.node(f.to)->kind);
}

std::string describe(const StaticModel& model, StaticEdgeRef e) {
  if (e.kind == StaticEdgeRef::Kind::flow) {
    const auto& f = model.flows()[e.index];
    return "flow " + f.from + " -> " + f.to;
  }
  const auto& t = model.triggers()[e.index];
  return "trigger " + t.from + " -> " + t.to;
}

}  // namespace tmkit
