#pragma once

#include <string>
#include <vector>

#include "tmkit/core/expected.hpp"
#include "tmkit/events/events.hpp"
#include "tmkit/sim/sim.hpp"

namespace tmkit {

struct ConformanceViolation {
  std::size_t step = 0;
  std::string node;
  std::string event;
  std::string message;

  friend bool operator==(const ConformanceViolation&, const ConformanceViolation&) = default;
};

struct ConformanceReport {
  bool conformant = true;
  /// event of each firing, consecutive repeats collapsed
  std::vector<std::string> event_sequence;
  std::vector<ConformanceViolation> violations;
};

/// The event a node belongs to. A transfer shared by two events maps to the
/// upstream one. Empty when no region holds the node.
std::string event_of(const BehavioralModel& behavior, std::string_view node);

/// Replays the trace against the precedence graph. Every consumed token and
/// control token must come from an earlier firing that delivered it to this
/// node, in the same event or one linked to it by a precedence edge. An
/// event's first occurrence needs an earlier occurrence of a predecessor
/// unless it has none or the firing took an injected thing.
/// Fails with "unmapped node" when a firing's node is in no event.
Expected<ConformanceReport, std::string> conforms(const Trace& trace, const BehavioralModel& behavior);

}  // namespace tmkit
