#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tmkit/core/diagnostic.hpp"
#include "tmkit/core/model.hpp"

namespace tmkit {

/// A connected region of the static model. `time` is carried as an opaque
/// annotation and never interpreted.
struct Event {
  std::string name;
  std::string description;
  std::vector<std::string> region;
  std::optional<std::string> time;

  [[nodiscard]] bool contains(std::string_view node_id) const;
  friend bool operator==(const Event&, const Event&) = default;
};

/// Events over one static model. Holds a non-owning pointer: the model must
/// outlive it.
class EventsModel {
 public:
  EventsModel() = default;
  EventsModel(const StaticModel& model, std::vector<Event> events);

  [[nodiscard]] const StaticModel& model() const { return *model_; }
  [[nodiscard]] const std::vector<Event>& events() const { return events_; }
  [[nodiscard]] const Event* event(std::string_view name) const;
  /// Names of the events whose region holds the node, in declaration order.
  [[nodiscard]] std::vector<std::string> events_containing(std::string_view node_id) const;

 private:
  const StaticModel* model_ = nullptr;
  std::vector<Event> events_;
};

/// Coverage, connectivity, and transfer-only overlap.
Diagnostics validate_events(const EventsModel& events);

/// How a precedence edge's inducing static edge may be cut.
enum class JointKind { internal, transfer_flow, trigger };

std::string to_string(JointKind k);

struct PrecedenceEdge {
  std::string from;
  std::string to;
  JointKind kind = JointKind::internal;
  /// e.g. "flow amount_rel -> amount_out"
  std::string via;

  friend bool operator==(const PrecedenceEdge&, const PrecedenceEdge&) = default;
};

/// Directed precedence graph over events, one edge per inducing static edge.
struct BehavioralModel {
  std::string name;
  std::vector<Event> events;
  std::vector<PrecedenceEdge> edges;

  [[nodiscard]] const Event* event(std::string_view name) const;
  /// Distinct predecessor event names of `name`.
  [[nodiscard]] std::vector<std::string> predecessors(std::string_view name) const;
  [[nodiscard]] bool has_edge(std::string_view from, std::string_view to) const;
};

BehavioralModel build_behavior(const EventsModel& events);

std::string export_dot(const BehavioralModel& behavior);

}  // namespace tmkit
