#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tmkit/core/diagnostic.hpp"
#include "tmkit/core/expected.hpp"
#include "tmkit/core/expr.hpp"

namespace tmkit {

/// The five generic stages. Arrive and accept are fused into receive.
enum class Stage { create, process, release, transfer, receive };

/// A stage plus, for transfers, the direction. Six values, five stages.
enum class ActionKind { create, process, release, transfer_in, transfer_out, receive };

Stage stage_of(ActionKind k);
bool is_transfer(ActionKind k);
std::string to_string(ActionKind k);
std::optional<ActionKind> parse_action_kind(std::string_view stage, std::string_view direction = {});

struct AttrDecl {
  std::string name;
  ValueType type = ValueType::integer;

  friend bool operator==(const AttrDecl&, const AttrDecl&) = default;
};

struct ThingDecl {
  std::string name;
  std::vector<AttrDecl> attrs;

  [[nodiscard]] const AttrDecl* attr(std::string_view n) const;
  friend bool operator==(const ThingDecl&, const ThingDecl&) = default;
};

struct Thimac {
  std::string name;
  std::optional<std::string> parent;
  bool is_store = false;
  std::vector<ThingInstance> store_contents;

  friend bool operator==(const Thimac&, const Thimac&) = default;
};

/// `Type(attr = expr, ...)`
struct ThingTemplate {
  std::string type;
  std::vector<std::pair<std::string, Expr>> attrs;

  friend bool operator==(const ThingTemplate&, const ThingTemplate&) = default;
};

/// One statement of a node effect.
///  set ATTR = EXPR                      assign on the node's output thing
///  append STORE [TEMPLATE [x EXPR]]     append the node's thing (or built things)
///  pop STORE                            take the head of STORE into scope
///  emit TEMPLATE                        the node outputs a new thing
struct EffectStmt {
  enum class Kind { set, append, pop, emit };

  Kind kind = Kind::set;
  std::string attr;
  Expr value;
  std::string store;
  std::optional<ThingTemplate> thing;
  std::optional<Expr> times;

  friend bool operator==(const EffectStmt&, const EffectStmt&) = default;
};

using Effect = std::vector<EffectStmt>;

std::string to_string(const EffectStmt& s);

struct ActionNode {
  std::string id;
  ActionKind kind = ActionKind::process;
  std::string thing;
  std::string thimac;
  /// Create nodes only: the thing comes from outside (an injection) even
  /// when the node is trigger-gated.
  bool input = false;
  Effect effect;

  friend bool operator==(const ActionNode&, const ActionNode&) = default;
};

struct FlowEdge {
  std::string from;
  std::string to;

  friend bool operator==(const FlowEdge&, const FlowEdge&) = default;
};

struct TriggerEdge {
  std::string from;
  std::string to;
  std::optional<Guard> guard;
  /// Fires iff every guarded sibling trigger from the same source is false.
  bool otherwise = false;

  friend bool operator==(const TriggerEdge&, const TriggerEdge&) = default;
};

/// Raw declarations, in the order they were authored.
struct ModelDecl {
  std::string name;
  std::vector<ThingDecl> things;
  std::vector<Thimac> thimacs;
  std::vector<ActionNode> nodes;
  std::vector<FlowEdge> flows;
  std::vector<TriggerEdge> triggers;

  friend bool operator==(const ModelDecl&, const ModelDecl&) = default;
};

/// A resolved, immutable static model. Only build_model creates one.
class StaticModel {
 public:
  StaticModel() = default;

  [[nodiscard]] const std::string& name() const { return decl_.name; }
  [[nodiscard]] const ModelDecl& decl() const { return decl_; }
  [[nodiscard]] std::span<const ThingDecl> things() const { return decl_.things; }
  [[nodiscard]] std::span<const Thimac> thimacs() const { return decl_.thimacs; }
  [[nodiscard]] std::span<const ActionNode> nodes() const { return decl_.nodes; }
  [[nodiscard]] std::span<const FlowEdge> flows() const { return decl_.flows; }
  [[nodiscard]] std::span<const TriggerEdge> triggers() const { return decl_.triggers; }

  [[nodiscard]] const ActionNode* node(std::string_view id) const;
  [[nodiscard]] const Thimac* thimac(std::string_view name) const;
  [[nodiscard]] const ThingDecl* thing(std::string_view name) const;

  /// Indices into flows()/triggers(), in declaration order.
  [[nodiscard]] const std::vector<std::size_t>& flows_into(std::string_view id) const;
  [[nodiscard]] const std::vector<std::size_t>& flows_out_of(std::string_view id) const;
  [[nodiscard]] const std::vector<std::size_t>& triggers_into(std::string_view id) const;
  [[nodiscard]] const std::vector<std::size_t>& triggers_out_of(std::string_view id) const;

  /// Type of the thing a node sends along its outgoing flows: the emitted
  /// type when the effect emits, the node's thing otherwise.
  [[nodiscard]] std::string output_type(const ActionNode& n) const;

  friend Expected<StaticModel, Diagnostics> build_model(ModelDecl decl);

 private:
  struct Adjacency {
    std::vector<std::size_t> flows_in, flows_out, triggers_in, triggers_out;
  };

  ModelDecl decl_;
  std::map<std::string, std::size_t, std::less<>> node_index_;
  std::map<std::string, std::size_t, std::less<>> thimac_index_;
  std::map<std::string, std::size_t, std::less<>> thing_index_;
  std::map<std::string, Adjacency, std::less<>> adjacency_;
};

/// Resolves declarations into a model, or returns every resolution failure.
Expected<StaticModel, Diagnostics> build_model(ModelDecl decl);

/// Legality of every flow and trigger, transfer matching, guard typing.
Diagnostics check_static(const StaticModel& model);

/// (from, to, same thimac) against the stage succession table.
bool flow_is_legal(ActionKind from, ActionKind to, bool same_thimac);
bool trigger_source_is_legal(ActionKind k);
bool trigger_target_is_legal(ActionKind k);

/// Static edges, flows first then triggers, referenced by index.
struct StaticEdgeRef {
  enum class Kind { flow, trigger };
  Kind kind = Kind::flow;
  std::size_t index = 0;

  friend bool operator==(const StaticEdgeRef&, const StaticEdgeRef&) = default;
  friend auto operator<=>(const StaticEdgeRef&, const StaticEdgeRef&) = default;
};

/// A flow with at least one transfer endpoint, or any trigger. Only these
/// may separate two super-events.
bool is_joint_capable(const StaticModel& model, StaticEdgeRef e);

std::string describe(const StaticModel& model, StaticEdgeRef e);

}  // namespace tmkit
