#include "tmkit/carve/carve.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "tmkit/core/dot.hpp"
#include "tmkit/core/naming.hpp"

namespace tmkit {

const SuperEvent* Carving::owner_of(std::string_view event) const {
  for (const auto& s : super_events) {
    if (std::find(s.members.begin(), s.members.end(), event) != s.members.end()) return &s;
  }
  return nullptr;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    // keep the smaller index as root so roots are stable
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<std::string> sorted_names(const BehavioralModel& b) {
  std::vector<std::string> names;
  for (const auto& e : b.events) names.push_back(e.name);
  std::sort(names.begin(), names.end(), NaturalLess{});
  return names;
}

std::map<std::string, std::size_t> index_of(const std::vector<std::string>& names) {
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < names.size(); ++i) idx.emplace(names[i], i);
  return idx;
}

std::vector<std::vector<std::string>> groups_from(DisjointSets& sets,
                                                  const std::vector<std::string>& names) {
  std::map<std::size_t, std::vector<std::string>> by_root;
  for (std::size_t i = 0; i < names.size(); ++i) by_root[sets.find(i)].push_back(names[i]);
  std::vector<std::vector<std::string>> out;
  for (auto& [root, members] : by_root) out.push_back(std::move(members));
  // names are pre-sorted, so members are too; order groups by first member
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return natural_less(a.front(), b.front());
  });
  return out;
}

Carving finish(const BehavioralModel& behavior, std::vector<SuperEvent> parts) {
  Carving c;
  c.name = behavior.name;
  c.super_events = std::move(parts);
  c.edges = behavior.edges;
  for (const auto& e : behavior.edges) {
    if (c.owner_of(e.from) != c.owner_of(e.to)) c.joints.push_back(e);
  }
  return c;
}

bool connected_within(const BehavioralModel& b, const std::vector<std::string>& members) {
  if (members.empty()) return false;
  const std::set<std::string> in(members.begin(), members.end());
  std::set<std::string> seen{members.front()};
  std::vector<std::string> stack{members.front()};
  while (!stack.empty()) {
    const auto cur = stack.back();
    stack.pop_back();
    for (const auto& e : b.edges) {
      const std::string* next = nullptr;
      if (e.from == cur) next = &e.to;
      if (e.to == cur) next = &e.from;
      if (next && in.count(*next) && seen.insert(*next).second) stack.push_back(*next);
    }
  }
  return seen.size() == in.size();
}

}  // namespace

std::vector<std::vector<std::string>> atomic_blocks(const BehavioralModel& behavior) {
  const auto names = sorted_names(behavior);
  const auto idx = index_of(names);
  DisjointSets sets(names.size());
  for (const auto& e : behavior.edges) {
    if (e.kind == JointKind::internal) sets.unite(idx.at(e.from), idx.at(e.to));
  }
  return groups_from(sets, names);
}

Expected<Carving, Diagnostics> carve_manual(const BehavioralModel& behavior,
                                            const std::vector<SuperEvent>& grouping) {
  Diagnostics out;
  auto add = [&](std::string code, std::string message, std::string subject) {
    out.push_back({std::move(code), std::move(message), std::move(subject), {}});
  };

  std::map<std::string, std::string> owner;
  std::set<std::string> part_names;
  for (const auto& s : grouping) {
    if (!part_names.insert(s.name).second) {
      add("duplicate super-event", "super-event '" + s.name + "' declared twice", s.name);
    }
    if (s.members.empty()) add("empty super-event", "super-event '" + s.name + "' is empty", s.name);
    for (const auto& m : s.members) {
      if (!behavior.event(m)) {
        add("unknown event", "super-event '" + s.name + "' names unknown event '" + m + "'", m);
        continue;
      }
      const auto [it, fresh] = owner.emplace(m, s.name);
      if (!fresh) {
        add("overlapping super-events",
            "event '" + m + "' is in both '" + it->second + "' and '" + s.name + "'", m);
      }
    }
  }
  for (const auto& e : behavior.events) {
    if (!owner.count(e.name)) add("ungrouped event", "event '" + e.name + "' is in no super-event", e.name);
  }
  for (const auto& s : grouping) {
    if (!s.members.empty() && !connected_within(behavior, s.members)) {
      add("disconnected super-event", "super-event '" + s.name + "' is not connected", s.name);
    }
  }
  for (const auto& e : behavior.edges) {
    const auto a = owner.find(e.from);
    const auto b = owner.find(e.to);
    if (a == owner.end() || b == owner.end() || a->second == b->second) continue;
    if (e.kind == JointKind::internal) {
      add("joint is not a transfer/trigger",
          e.from + " -> " + e.to + " (" + e.via + ") separates '" + a->second + "' from '" +
              b->second + "'",
          e.from + "->" + e.to);
    }
  }
  if (!out.empty()) return unexpected(std::move(out));
  return finish(behavior, grouping);
}

Carving carve_auto(const BehavioralModel& behavior, std::optional<std::size_t> max_parts) {
  const auto names = sorted_names(behavior);
  const auto idx = index_of(names);
  const auto blocks = atomic_blocks(behavior);

  std::vector<std::size_t> block_of(names.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (const auto& m : blocks[b]) block_of[idx.at(m)] = b;
  }

  struct PairStats {
    std::size_t transfer_joints = 0;
    std::size_t joints = 0;
  };
  std::map<std::pair<std::size_t, std::size_t>, PairStats> pairs;
  for (const auto& e : behavior.edges) {
    auto a = block_of[idx.at(e.from)];
    auto b = block_of[idx.at(e.to)];
    if (a == b) continue;
    if (b < a) std::swap(a, b);
    auto& st = pairs[{a, b}];
    ++st.joints;
    if (e.kind == JointKind::transfer_flow) ++st.transfer_joints;
  }

  // Weakest connection first: fewest transfer-flow joints, then fewest joints,
  // then smallest combined size, then the blocks' first names. Blocks are
  // already in natural order of their first member, so block indices stand
  // in for names.
  struct Candidate {
    std::size_t transfer_joints, joints, size, a, b;
  };
  std::vector<Candidate> order;
  for (const auto& [ab, st] : pairs) {
    order.push_back({st.transfer_joints, st.joints, blocks[ab.first].size() + blocks[ab.second].size(),
                     ab.first, ab.second});
  }
  std::sort(order.begin(), order.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.transfer_joints, x.joints, x.size, x.a, x.b) <
           std::tie(y.transfer_joints, y.joints, y.size, y.a, y.b);
  });

  const std::size_t limit = std::max<std::size_t>(1, max_parts.value_or(blocks.size()));
  DisjointSets sets(blocks.size());
  std::size_t parts = blocks.size();
  for (const auto& c : order) {
    if (parts <= limit) break;
    if (sets.unite(c.a, c.b)) --parts;
  }

  std::map<std::size_t, std::vector<std::string>> merged;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& dst = merged[sets.find(b)];
    dst.insert(dst.end(), blocks[b].begin(), blocks[b].end());
  }
  std::vector<std::vector<std::string>> groups;
  for (auto& [root, members] : merged) {
    std::sort(members.begin(), members.end(), NaturalLess{});
    groups.push_back(std::move(members));
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return natural_less(a.front(), b.front()); });

  std::vector<SuperEvent> parts_out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    parts_out.push_back({"SE" + std::to_string(i + 1), std::move(groups[i])});
  }
  Carving c = finish(behavior, std::move(parts_out));
  if (blocks.size() == 1 && names.size() > 1) {
    c.notices.push_back("no legal carving: every candidate cut crosses a non-joint edge");
  }
  if (parts > limit) {
    c.notices.push_back("could not reach " + std::to_string(limit) + " parts: " +
                        std::to_string(parts) + " disconnected groups remain");
  }
  return c;
}

BehavioralModel contract(const BehavioralModel& behavior, const Carving& carving) {
  BehavioralModel out;
  out.name = behavior.name;
  for (const auto& s : carving.super_events) {
    out.events.push_back({s.name, {}, {}, std::nullopt});
  }
  std::sort(out.events.begin(), out.events.end(),
            [](const Event& a, const Event& b) { return natural_less(a.name, b.name); });
  for (const auto& j : carving.joints) {
    out.edges.push_back(
        {carving.owner_of(j.from)->name, carving.owner_of(j.to)->name, j.kind, j.via});
  }
  return out;
}

std::string export_dot(const Carving& carving) {
  DotWriter w(carving.name.empty() ? "carving" : carving.name);
  for (const auto& s : carving.super_events) w.cluster(s.name, s.members);
  for (const auto& e : carving.edges) {
    const bool joint = carving.owner_of(e.from) != carving.owner_of(e.to);
    w.edge(e.from, e.to, e.kind == JointKind::trigger, joint ? "joint: " + e.via : std::string{});
  }
  return w.finish();
}

}  // namespace tmkit
