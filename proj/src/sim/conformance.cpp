#include "tmkit/sim/conformance.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tmkit/core/naming.hpp"

namespace tmkit {

std::string event_of(const BehavioralModel& behavior, std::string_view node) {
  std::vector<std::string> owners;
  for (const auto& e : behavior.events) {
    if (e.contains(node)) owners.push_back(e.name);
  }
  if (owners.empty()) return {};
  std::sort(owners.begin(), owners.end(), NaturalLess{});
  for (const auto& a : owners) {
    for (const auto& b : owners) {
      if (a != b && behavior.has_edge(a, b)) return a;
    }
  }
  return owners.front();
}

namespace {

struct Origin {
  std::size_t firing = 0;
  std::string to;
};

}  // namespace

Expected<ConformanceReport, std::string> conforms(const Trace& trace, const BehavioralModel& behavior) {
  const auto& firings = trace.firings;
  std::vector<std::string> events;
  for (const auto& f : firings) {
    auto e = event_of(behavior, f.node);
    if (e.empty()) return unexpected("unmapped node '" + f.node + "' at step " + std::to_string(f.step));
    events.push_back(std::move(e));
  }

  // every delivery of every token and control id, in trace order
  std::map<std::uint64_t, std::vector<Origin>> tokens;
  std::map<std::uint64_t, std::vector<Origin>> controls;
  for (std::size_t i = 0; i < firings.size(); ++i) {
    for (const auto& t : firings[i].produced) tokens[t.id].push_back({i, t.to});
    for (const auto& c : firings[i].raised) controls[c.id].push_back({i, c.to});
  }

  ConformanceReport report;
  std::set<std::string> seen;
  auto violate = [&](std::size_t j, std::string message) {
    report.violations.push_back({firings[j].step, firings[j].node, events[j], std::move(message)});
  };

  // A thing keeps its id while it is forwarded, so an injected thing may be
  // produced later under the same id. Its first consumption without an
  // earlier delivery is the injection; returns true for it.
  std::set<std::uint64_t> taken;
  auto check = [&](std::size_t j, std::uint64_t id, const std::map<std::uint64_t, std::vector<Origin>>& index,
                   const char* what, bool injectable) {
    const bool first = taken.insert(id).second;
    const auto it = index.find(id);
    const Origin* last = nullptr;
    if (it != index.end()) {
      for (const auto& o : it->second) {
        if (o.firing < j) last = &o;
      }
    }
    const auto label = std::string(what) + " " + std::to_string(id);
    if (!last) {
      if (injectable && first) return true;
      violate(j, label + " consumed before it was produced");
      return false;
    }
    if (last->to != firings[j].node) {
      violate(j, label + " was delivered to '" + last->to + "', not here");
      return false;
    }
    const auto& from = events[last->firing];
    if (from != events[j] && !behavior.has_edge(from, events[j])) {
      violate(j, label + " comes from " + from + ", which does not precede " + events[j]);
    }
    return false;
  };

  for (std::size_t j = 0; j < firings.size(); ++j) {
    const auto& f = firings[j];
    bool injected = false;
    for (const auto& t : f.consumed) injected = check(j, t.id, tokens, "token", true) || injected;
    for (auto c : f.controls) check(j, c, controls, "control", false);

    if (!seen.count(events[j])) {
      const auto preds = behavior.predecessors(events[j]);
      bool preceded = preds.empty() || injected;
      for (const auto& p : preds) preceded = preceded || seen.count(p) > 0;
      if (!preceded) violate(j, "first occurrence of " + events[j] + " before any of its predecessors");
    }
    seen.insert(events[j]);
    if (report.event_sequence.empty() || report.event_sequence.back() != events[j]) {
      report.event_sequence.push_back(events[j]);
    }
  }
  report.conformant = report.violations.empty();
  return report;
}

}  // namespace tmkit
