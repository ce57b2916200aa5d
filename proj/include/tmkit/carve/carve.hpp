#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tmkit/core/diagnostic.hpp"
#include "tmkit/core/expected.hpp"
#include "tmkit/events/events.hpp"

namespace tmkit {

struct SuperEvent {
  std::string name;
  std::vector<std::string> members;

  friend bool operator==(const SuperEvent&, const SuperEvent&) = default;
};

/// A partition of the events into super-events. `joints` are exactly the
/// behavioural edges whose endpoints fall in different super-events.
struct Carving {
  std::string name;
  std::vector<SuperEvent> super_events;
  std::vector<PrecedenceEdge> joints;
  /// Every behavioural edge, for rendering.
  std::vector<PrecedenceEdge> edges;
  std::vector<std::string> notices;

  [[nodiscard]] const SuperEvent* owner_of(std::string_view event) const;
};

/// Checks partition, per-part connectivity, and that every cross edge is
/// transfer- or trigger-induced.
Expected<Carving, Diagnostics> carve_manual(const BehavioralModel& behavior,
                                            const std::vector<SuperEvent>& grouping);

/// Groups of events tied together by internal (non-joint) edges. Every legal
/// carving is a coarsening of this partition. Members and groups are in
/// natural name order.
std::vector<std::vector<std::string>> atomic_blocks(const BehavioralModel& behavior);

/// Cuts at every legal joint, then merges adjacent atomic blocks, weakest
/// connection first, until at most `max_parts` remain. Default: no merging.
Carving carve_auto(const BehavioralModel& behavior, std::optional<std::size_t> max_parts = {});

/// Super-events as nodes, joints as edges.
BehavioralModel contract(const BehavioralModel& behavior, const Carving& carving);

/// One cluster per super-event; joints drawn bold.
std::string export_dot(const Carving& carving);

}  // namespace tmkit
