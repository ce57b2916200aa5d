#include "tmkit/events/events.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "tmkit/core/dot.hpp"
#include "tmkit/core/naming.hpp"

namespace tmkit {

bool Event::contains(std::string_view node_id) const {
  return std::find(region.begin(), region.end(), node_id) != region.end();
}

EventsModel::EventsModel(const StaticModel& model, std::vector<Event> events)
    : model_(&model), events_(std::move(events)) {}

const Event* EventsModel::event(std::string_view name) const {
  for (const auto& e : events_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<std::string> EventsModel::events_containing(std::string_view node_id) const {
  std::vector<std::string> out;
  for (const auto& e : events_) {
    if (e.contains(node_id)) out.push_back(e.name);
  }
  return out;
}

namespace {

// Undirected connectivity of `region` using flow and trigger edges whose
// endpoints both lie in the region.
bool region_connected(const StaticModel& m, const std::vector<std::string>& region) {
  if (region.empty()) return false;
  const std::set<std::string> members(region.begin(), region.end());
  std::map<std::string, std::vector<std::string>> adj;
  auto link = [&](const std::string& a, const std::string& b) {
    if (members.count(a) && members.count(b)) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  };
  for (const auto& f : m.flows()) link(f.from, f.to);
  for (const auto& t : m.triggers()) link(t.from, t.to);

  std::set<std::string> seen{region.front()};
  std::vector<std::string> stack{region.front()};
  while (!stack.empty()) {
    const auto cur = stack.back();
    stack.pop_back();
    for (const auto& nxt : adj[cur]) {
      if (seen.insert(nxt).second) stack.push_back(nxt);
    }
  }
  return seen.size() == members.size();
}

}  // namespace

Diagnostics validate_events(const EventsModel& events) {
  Diagnostics out;
  const auto& m = events.model();
  auto add = [&](std::string code, std::string message, std::string subject) {
    out.push_back({std::move(code), std::move(message), std::move(subject), {}});
  };

  std::set<std::string> names;
  for (const auto& e : events.events()) {
    if (!names.insert(e.name).second) {
      add("duplicate event", "event '" + e.name + "' declared twice", e.name);
    }
    if (e.region.empty()) {
      add("empty region", "event '" + e.name + "' has no nodes", e.name);
      continue;
    }
    for (const auto& id : e.region) {
      if (!m.node(id)) add("unknown node", "event '" + e.name + "' names unknown node '" + id + "'", id);
    }
    if (!region_connected(m, e.region)) {
      add("disconnected region", "event '" + e.name + "' is not connected", e.name);
    }
  }

  for (const auto& n : m.nodes()) {
    const auto owners = events.events_containing(n.id);
    if (owners.empty()) {
      add("uncovered node", "node '" + n.id + "' belongs to no event", n.id);
    } else if (owners.size() > 1 && !is_transfer(n.kind)) {
      std::string list;
      for (const auto& o : owners) list += (list.empty() ? "" : ", ") + o;
      add("illegal overlap", to_string(n.kind) + " node '" + n.id + "' is shared by " + list, n.id);
    }
  }
  return out;
}

std::string to_string(JointKind k) {
  switch (k) {
    case JointKind::internal:
      return "internal";
    case JointKind::transfer_flow:
      return "transfer";
    case JointKind::trigger:
      return "trigger";
  }
  return "?";
}

const Event* BehavioralModel::event(std::string_view name) const {
  for (const auto& e : events) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<std::string> BehavioralModel::predecessors(std::string_view name) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.to == name && std::find(out.begin(), out.end(), e.from) == out.end()) {
      out.push_back(e.from);
    }
  }
  return out;
}

bool BehavioralModel::has_edge(std::string_view from, std::string_view to) const {
  return std::any_of(edges.begin(), edges.end(),
                     [&](const PrecedenceEdge& e) { return e.from == from && e.to == to; });
}

BehavioralModel build_behavior(const EventsModel& events) {
  const auto& m = events.model();
  BehavioralModel b;
  b.name = m.name();
  b.events = events.events();
  std::sort(b.events.begin(), b.events.end(),
            [](const Event& x, const Event& y) { return natural_less(x.name, y.name); });

  struct Keyed {
    PrecedenceEdge edge;
    StaticEdgeRef ref;
  };
  std::vector<Keyed> found;
  auto scan = [&](const std::string& from, const std::string& to, StaticEdgeRef ref) {
    const auto sources = events.events_containing(from);
    const auto targets = events.events_containing(to);
    for (const auto& a : sources) {
      for (const auto& c : targets) {
        if (a == c) continue;
        JointKind kind = JointKind::trigger;
        if (ref.kind == StaticEdgeRef::Kind::flow) {
          kind = is_joint_capable(m, ref) ? JointKind::transfer_flow : JointKind::internal;
        }
        found.push_back({{a, c, kind, describe(m, ref)}, ref});
      }
    }
  };
  for (std::size_t i = 0; i < m.flows().size(); ++i) {
    scan(m.flows()[i].from, m.flows()[i].to, {StaticEdgeRef::Kind::flow, i});
  }
  for (std::size_t i = 0; i < m.triggers().size(); ++i) {
    scan(m.triggers()[i].from, m.triggers()[i].to, {StaticEdgeRef::Kind::trigger, i});
  }

  // Order by endpoints, then by the inducing edge's text so the result does
  // not depend on declaration order.
  std::sort(found.begin(), found.end(), [](const Keyed& x, const Keyed& y) {
    if (x.edge.from != y.edge.from) return natural_less(x.edge.from, y.edge.from);
    if (x.edge.to != y.edge.to) return natural_less(x.edge.to, y.edge.to);
    return x.edge.via < y.edge.via;
  });
  for (auto& k : found) b.edges.push_back(std::move(k.edge));
  return b;
}

std::string export_dot(const BehavioralModel& behavior) {
  DotWriter w(behavior.name.empty() ? "behavior" : behavior.name);
  for (const auto& e : behavior.events) {
    w.node(e.name, e.name + "\\n" + e.description, "box");
  }
  for (const auto& e : behavior.edges) {
    w.edge(e.from, e.to, e.kind == JointKind::trigger, e.via);
  }
  return w.finish();
}

}  // namespace tmkit
