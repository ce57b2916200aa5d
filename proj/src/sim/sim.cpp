#include "tmkit/sim/sim.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tmkit {

std::string to_string(SimOutcome o) {
  switch (o) {
    case SimOutcome::quiescent:
      return "quiescent";
    case SimOutcome::budget_exhausted:
      return "step budget exhausted";
    case SimOutcome::eval_failure:
      return "effect evaluation failure";
    case SimOutcome::bad_injection:
      return "bad injection";
  }
  return "?";
}

bool accepts_injection(const StaticModel& model, const ActionNode& node) {
  if (node.kind == ActionKind::create) {
    return node.input || model.triggers_into(node.id).empty();
  }
  return node.kind == ActionKind::transfer_in;
}

namespace {

using Context = std::map<std::string, ThingInstance>;

struct Token {
  std::uint64_t id = 0;
  ThingInstance thing;
};

struct Control {
  std::uint64_t id = 0;
  Context payload;
};

// Static requirements of a node, computed once per run.
struct NodePlan {
  const ActionNode* node = nullptr;
  std::vector<std::string> ports;  // input thing types, sorted
  bool gated = false;
  bool injectable = false;
  std::vector<std::string> pops;
  std::vector<std::size_t> flows_out;     // sorted by target id
  std::vector<std::size_t> triggers_out;  // declaration order
};

struct NodeState {
  std::map<std::string, std::deque<Token>> ports;
  std::deque<Control> controls;
  std::deque<Token> injected;
  std::optional<std::size_t> enabled_since;
};

class Simulator {
 public:
  Simulator(const StaticModel& model, std::size_t max_steps) : model_(model), max_steps_(max_steps) {
    for (const auto& n : model.nodes()) {
      NodePlan p;
      p.node = &n;
      std::set<std::string> ports;
      for (auto i : model.flows_into(n.id)) ports.insert(model.output_type(*model.node(model.flows()[i].from)));
      if (n.kind == ActionKind::transfer_in) ports.insert(n.thing);
      p.ports.assign(ports.begin(), ports.end());
      p.gated = !model.triggers_into(n.id).empty();
      p.injectable = n.kind == ActionKind::create && accepts_injection(model, n);
      for (const auto& s : n.effect) {
        if (s.kind == EffectStmt::Kind::pop) p.pops.push_back(s.store);
      }
      p.flows_out = model.flows_out_of(n.id);
      std::sort(p.flows_out.begin(), p.flows_out.end(), [&](std::size_t a, std::size_t b) {
        return model.flows()[a].to < model.flows()[b].to;
      });
      p.triggers_out = model.triggers_out_of(n.id);
      plans_.emplace(n.id, std::move(p));
      state_[n.id];
    }
    for (const auto& t : model.thimacs()) {
      if (t.is_store) stores_[t.name].assign(t.store_contents.begin(), t.store_contents.end());
    }
  }

  SimResult run(const std::vector<Injection>& injections) {
    for (const auto& inj : injections) {
      const auto* n = model_.node(inj.node);
      if (!n || !accepts_injection(model_, *n)) {
        return fail(SimOutcome::bad_injection, "node '" + inj.node + "' does not accept injections");
      }
      if (inj.thing.type != n->thing) {
        return fail(SimOutcome::bad_injection,
                    "node '" + inj.node + "' handles " + n->thing + ", not " + inj.thing.type);
      }
      Token t{next_id_++, inj.thing};
      auto& st = state_[inj.node];
      if (plans_.at(inj.node).injectable) {
        st.injected.push_back(std::move(t));
      } else {
        st.ports[inj.thing.type].push_back(std::move(t));
      }
    }

    std::size_t step = 0;
    while (true) {
      refresh_enabled(step);
      const std::string* next = pick();
      if (!next) break;
      if (step >= max_steps_) {
        return fail(SimOutcome::budget_exhausted,
                    "step budget exhausted after " + std::to_string(max_steps_) + " steps");
      }
      ++step;
      try {
        fire(*next, step);
      } catch (const EvalError& e) {
        return fail(SimOutcome::eval_failure, "node '" + *next + "': " + e.what());
      }
    }
    return finish(SimOutcome::quiescent, {});
  }

 private:
  bool enabled(const NodePlan& p, const NodeState& s) const {
    if (p.ports.empty() && !p.gated && !p.injectable) return false;
    for (const auto& port : p.ports) {
      const auto it = s.ports.find(port);
      if (it == s.ports.end() || it->second.empty()) return false;
    }
    if (p.gated && s.controls.empty()) return false;
    if (p.injectable && s.injected.empty()) return false;
    for (const auto& store : p.pops) {
      if (stores_.at(store).empty()) return false;
    }
    return true;
  }

  void refresh_enabled(std::size_t step) {
    for (auto& [id, s] : state_) {
      if (enabled(plans_.at(id), s)) {
        if (!s.enabled_since) s.enabled_since = step;
      } else {
        s.enabled_since.reset();
      }
    }
  }

  const std::string* pick() const {
    const std::string* best = nullptr;
    std::size_t best_since = 0;
    for (const auto& [id, s] : state_) {  // map: ids ascending
      if (!s.enabled_since) continue;
      if (!best || *s.enabled_since < best_since) {
        best = &id;
        best_since = *s.enabled_since;
      }
    }
    return best;
  }

  ExprEnv env(const Context& ctx) const {
    ExprEnv e;
    e.path = [&ctx](const std::string& head, const std::string& attr) -> Value {
      const auto it = ctx.find(head);
      if (it == ctx.end()) throw EvalError("no " + head + " in scope");
      const auto a = it->second.attrs.find(attr);
      if (a == it->second.attrs.end()) throw EvalError("missing attribute " + head + "." + attr);
      return a->second;
    };
    e.sum = [this](const std::string& head, const std::string& attr) -> Value {
      const auto it = stores_.find(head);
      if (it == stores_.end()) throw EvalError("no store " + head);
      std::int64_t total = 0;
      for (const auto& item : it->second) {
        const auto a = item.attrs.find(attr);
        if (a == item.attrs.end() || type_of(a->second) != ValueType::integer) {
          throw EvalError("store " + head + " item lacks integer " + attr);
        }
        total += std::get<std::int64_t>(a->second);
      }
      return total;
    };
    e.size = [this](const std::string& head) -> Value {
      const auto it = stores_.find(head);
      if (it == stores_.end()) throw EvalError("no store " + head);
      return static_cast<std::int64_t>(it->second.size());
    };
    return e;
  }

  ThingInstance build(const ThingTemplate& t, const Context& ctx) const {
    const auto e = env(ctx);
    ThingInstance out{t.type, {}};
    for (const auto& [attr, expr] : t.attrs) out.attrs[attr] = evaluate(expr, e);
    return out;
  }

  void fire(const std::string& id, std::size_t step) {
    const auto& plan = plans_.at(id);
    const auto& node = *plan.node;
    auto& st = state_.at(id);
    st.enabled_since.reset();

    Firing f;
    f.step = step;
    f.node = id;
    Context ctx;

    if (plan.gated) {
      auto c = std::move(st.controls.front());
      st.controls.pop_front();
      f.controls.push_back(c.id);
      ctx = std::move(c.payload);
    }

    std::optional<Token> own;  // the token this node handles
    if (plan.injectable) {
      own = std::move(st.injected.front());
      st.injected.pop_front();
      f.consumed.push_back({own->id, own->thing, {}});
      ctx[own->thing.type] = own->thing;
    }
    for (const auto& port : plan.ports) {
      auto& q = st.ports.at(port);
      Token t = std::move(q.front());
      q.pop_front();
      f.consumed.push_back({t.id, t.thing, {}});
      ctx[t.thing.type] = t.thing;
      if (!own || (own->thing.type != node.thing && t.thing.type == node.thing)) own = std::move(t);
    }

    // The output: a new thing for create, the handled token otherwise.
    std::optional<Token> out;
    bool fresh = false;
    if (node.kind == ActionKind::create) {
      out = Token{0, own ? own->thing : ThingInstance{node.thing, {}}};
      fresh = true;
    } else if (own) {
      out = std::move(own);
    } else if (const auto it = ctx.find(node.thing); it != ctx.end()) {
      out = Token{0, it->second};
      fresh = true;
    }
    // A created thing joins the scope after the effect, so `set` reads what
    // the node was triggered with.
    const bool created = node.kind == ActionKind::create;
    if (out && !created) ctx[out->thing.type] = out->thing;

    for (const auto& s : node.effect) {
      switch (s.kind) {
        case EffectStmt::Kind::pop: {
          auto& store = stores_.at(s.store);
          ThingInstance item = std::move(store.front());
          store.pop_front();
          f.popped.push_back(item);
          ctx[item.type] = item;
          break;
        }
        case EffectStmt::Kind::set: {
          if (!out) throw EvalError("nothing to set '" + s.attr + "' on");
          out->thing.attrs[s.attr] = evaluate(s.value, env(ctx));
          if (!created) ctx[out->thing.type] = out->thing;
          break;
        }
        case EffectStmt::Kind::append: {
          auto& store = stores_.at(s.store);
          if (s.thing) {
            std::int64_t times = 1;
            if (s.times) {
              const auto v = evaluate(*s.times, env(ctx));
              if (type_of(v) != ValueType::integer) throw EvalError("repeat count is text");
              times = std::get<std::int64_t>(v);
            }
            const auto item = build(*s.thing, ctx);
            for (std::int64_t i = 0; i < times; ++i) store.push_back(item);
          } else {
            const auto it = ctx.find(node.thing);
            if (it == ctx.end()) throw EvalError("no " + node.thing + " to append");
            store.push_back(it->second);
            // the thing now lives in the store
            if (out && out->thing.type == node.thing) out.reset();
          }
          break;
        }
        case EffectStmt::Kind::emit: {
          out = Token{0, build(*s.thing, ctx)};
          fresh = true;
          ctx[out->thing.type] = out->thing;
          break;
        }
      }
    }

    if (out) {
      ctx[out->thing.type] = out->thing;
      if (fresh || out->id == 0) out->id = next_id_++;
      TokenRecord rec{out->id, out->thing, {}};
      if (!plan.flows_out.empty()) {
        const auto& target = model_.flows()[plan.flows_out.front()].to;
        rec.to = target;
        state_.at(target).ports[model_.output_type(node)].push_back(*out);
      }
      if (fresh || !rec.to.empty()) f.produced.push_back(std::move(rec));
    }

    raise_triggers(plan, ctx, f);
    trace_.firings.push_back(std::move(f));
  }

  void raise_triggers(const NodePlan& plan, const Context& ctx, Firing& f) {
    const auto e = env(ctx);
    bool guarded_fired = false;
    std::vector<const TriggerEdge*> fire_list;
    for (auto i : plan.triggers_out) {
      const auto& t = model_.triggers()[i];
      if (t.guard) {
        if (evaluate(*t.guard, e)) {
          guarded_fired = true;
          fire_list.push_back(&t);
        }
      } else if (!t.otherwise) {
        fire_list.push_back(&t);
      }
    }
    if (!guarded_fired) {
      for (auto i : plan.triggers_out) {
        const auto& t = model_.triggers()[i];
        if (t.otherwise) fire_list.push_back(&t);
      }
    }
    for (const auto* t : fire_list) {
      const auto id = next_id_++;
      state_.at(t->to).controls.push_back({id, ctx});
      f.raised.push_back({id, t->to});
    }
  }

  SimResult fail(SimOutcome o, std::string message) { return finish(o, std::move(message)); }

  SimResult finish(SimOutcome o, std::string message) {
    SimResult r;
    r.trace = std::move(trace_);
    r.outcome = o;
    r.message = std::move(message);
    for (auto& [name, items] : stores_) r.stores[name].assign(items.begin(), items.end());
    return r;
  }

  const StaticModel& model_;
  std::size_t max_steps_;
  std::map<std::string, NodePlan> plans_;
  std::map<std::string, NodeState> state_;
  std::map<std::string, std::deque<ThingInstance>> stores_;
  std::uint64_t next_id_ = 1;
  Trace trace_;
};

nlohmann::json to_json(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

nlohmann::json to_json(const ThingInstance& t) {
  nlohmann::json attrs = nlohmann::json::object();
  for (const auto& [k, v] : t.attrs) attrs[k] = to_json(v);
  return {{"type", t.type}, {"attrs", attrs}};
}

nlohmann::json to_json(const TokenRecord& r) {
  nlohmann::json j{{"id", r.id}, {"thing", to_json(r.thing)}};
  if (!r.to.empty()) j["to"] = r.to;
  return j;
}

ThingInstance thing_from_json(const nlohmann::json& j) {
  ThingInstance t{j.at("type").get<std::string>(), {}};
  for (const auto& [k, v] : j.at("attrs").items()) {
    if (v.is_number_integer()) {
      t.attrs[k] = v.get<std::int64_t>();
    } else {
      t.attrs[k] = v.get<std::string>();
    }
  }
  return t;
}

TokenRecord token_from_json(const nlohmann::json& j) {
  TokenRecord r{j.at("id").get<std::uint64_t>(), thing_from_json(j.at("thing")), {}};
  if (j.contains("to")) r.to = j.at("to").get<std::string>();
  return r;
}

}  // namespace

SimResult simulate(const StaticModel& model, const std::vector<Injection>& injections,
                   std::size_t max_steps) {
  return Simulator(model, max_steps).run(injections);
}

std::string to_jsonl(const Trace& trace) {
  std::string out;
  for (const auto& f : trace.firings) {
    nlohmann::json j;
    j["step"] = f.step;
    j["node"] = f.node;
    j["consumed"] = nlohmann::json::array();
    for (const auto& t : f.consumed) j["consumed"].push_back(to_json(t));
    j["controls"] = f.controls;
    j["produced"] = nlohmann::json::array();
    for (const auto& t : f.produced) j["produced"].push_back(to_json(t));
    j["raised"] = nlohmann::json::array();
    for (const auto& c : f.raised) j["raised"].push_back({{"id", c.id}, {"to", c.to}});
    if (!f.popped.empty()) {
      j["popped"] = nlohmann::json::array();
      for (const auto& t : f.popped) j["popped"].push_back(to_json(t));
    }
    out += j.dump() + "\n";
  }
  return out;
}

Expected<Trace, std::string> trace_from_jsonl(std::string_view text) {
  Trace trace;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Firing f;
      f.step = j.at("step").get<std::size_t>();
      f.node = j.at("node").get<std::string>();
      for (const auto& t : j.at("consumed")) f.consumed.push_back(token_from_json(t));
      f.controls = j.at("controls").get<std::vector<std::uint64_t>>();
      for (const auto& t : j.at("produced")) f.produced.push_back(token_from_json(t));
      for (const auto& c : j.at("raised")) {
        f.raised.push_back({c.at("id").get<std::uint64_t>(), c.at("to").get<std::string>()});
      }
      if (j.contains("popped")) {
        for (const auto& t : j.at("popped")) f.popped.push_back(thing_from_json(t));
      }
      trace.firings.push_back(std::move(f));
    } catch (const nlohmann::json::exception& e) {
      return unexpected("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return trace;
}

}  // namespace tmkit
