#pragma once

#include <map>
#include <string>
#include <vector>

#include "tmkit/core/expected.hpp"
#include "tmkit/core/expr.hpp"
#include "tmkit/core/model.hpp"
#include "tmkit/harness/scenario.hpp"

// Input enumeration and expected-value computation. Nothing here may depend
// on the simulator: expected values come from the binding and the model's
// declared data alone.

namespace tmkit {

/// A value bound to one generator name: a scalar, or named fields (store
/// tuples, multiset counts).
struct BoundValue {
  std::optional<Value> scalar;
  std::map<std::string, Value> fields;
  /// multiset weights, parallel to fields
  std::map<std::string, std::int64_t> weights;

  friend bool operator==(const BoundValue&, const BoundValue&) = default;
};

struct Binding {
  std::vector<std::pair<std::string, BoundValue>> entries;

  [[nodiscard]] const BoundValue* find(std::string_view name) const;
  friend bool operator==(const Binding&, const Binding&) = default;
};

std::string to_string(const Binding& b);

/// Values produced by earlier scenarios, keyed "scenario.output".
using UpstreamValues = std::map<std::string, std::vector<Value>>;

/// Cartesian product of the generators in declaration order (last varies
/// fastest). Errors: "unbounded generator", unknown store or upstream.
Expected<std::vector<Binding>, std::string> enumerate_inputs(const std::vector<Generator>& generators,
                                                            const StaticModel& model,
                                                            const UpstreamValues& upstream = {});

/// Analytic size of one generator's dimension (no enumeration).
Expected<std::size_t, std::string> cardinality(const Generator& g, const StaticModel& model,
                                               const UpstreamValues& upstream = {});

/// Environment resolving `name`, `name.field`, sum(name), size(STORE).
ExprEnv oracle_env(const Binding& binding, const StaticModel& model);

/// The thing an injection template denotes under a binding.
ThingInstance instantiate(const ThingTemplate& t, const Binding& binding, const StaticModel& model);

}  // namespace tmkit
