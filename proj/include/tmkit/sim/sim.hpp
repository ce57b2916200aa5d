#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tmkit/core/expected.hpp"
#include "tmkit/core/model.hpp"

namespace tmkit {

struct Injection {
  std::string node;
  ThingInstance thing;

  friend bool operator==(const Injection&, const Injection&) = default;
};

/// A thing token as it appears in a trace. `to` is the node a produced token
/// was delivered to (empty when it left the model or was not forwarded).
struct TokenRecord {
  std::uint64_t id = 0;
  ThingInstance thing;
  std::string to;

  friend bool operator==(const TokenRecord&, const TokenRecord&) = default;
};

/// A control token raised by a trigger.
struct ControlRecord {
  std::uint64_t id = 0;
  std::string to;

  friend bool operator==(const ControlRecord&, const ControlRecord&) = default;
};

struct Firing {
  std::size_t step = 0;
  std::string node;
  std::vector<TokenRecord> consumed;
  std::vector<std::uint64_t> controls;
  std::vector<TokenRecord> produced;
  std::vector<ControlRecord> raised;
  /// items taken out of stores by pop
  std::vector<ThingInstance> popped;

  friend bool operator==(const Firing&, const Firing&) = default;
};

struct Trace {
  std::vector<Firing> firings;

  friend bool operator==(const Trace&, const Trace&) = default;
};

enum class SimOutcome { quiescent, budget_exhausted, eval_failure, bad_injection };

std::string to_string(SimOutcome o);

struct SimResult {
  Trace trace;
  SimOutcome outcome = SimOutcome::quiescent;
  std::string message;
  /// final store contents by store name
  std::map<std::string, std::vector<ThingInstance>> stores;

  [[nodiscard]] bool ok() const { return outcome == SimOutcome::quiescent; }
};

/// Runs the model until no node is enabled or `max_steps` firings happened.
///
/// A node is enabled when it holds a token for every input port (incoming
/// flows grouped by the type of thing they carry), a control token if any
/// trigger targets it, an injected thing if it is an entry node, and a
/// non-empty store for every pop in its effect. Among enabled nodes the one
/// enabled longest fires first; ties go to the smaller id.
SimResult simulate(const StaticModel& model, const std::vector<Injection>& injections,
                   std::size_t max_steps);

/// True for create nodes that take input (or have no trigger) and for
/// transfer(in) nodes. A create node waits for its injection; a transfer(in)
/// node takes injected things alongside the ones arriving by flow.
bool accepts_injection(const StaticModel& model, const ActionNode& node);

/// One JSON object per firing, keys sorted.
std::string to_jsonl(const Trace& trace);
Expected<Trace, std::string> trace_from_jsonl(std::string_view text);

}  // namespace tmkit
