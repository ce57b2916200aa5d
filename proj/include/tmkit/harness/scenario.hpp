#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tmkit/core/expr.hpp"
#include "tmkit/core/model.hpp"

namespace tmkit {

/// One dimension of a scenario's input space.
struct Generator {
  enum class Kind {
    values,    // let x in {1, 2, "a"}
    range,     // let x in 1..5
    store,     // let rec from Records         (one binding per stored item)
    multiset,  // let coins multiset {n25 = 25, ...} size 1..5
    upstream,  // let price from drinks.price  (output of an earlier scenario)
  };

  Kind kind = Kind::values;
  std::string name;
  std::vector<Value> values;
  std::optional<std::int64_t> lo;
  std::optional<std::int64_t> hi;
  std::string store;
  /// multiset element names and their weights (used by sum())
  std::vector<std::pair<std::string, std::int64_t>> elements;
  std::string upstream_scenario;
  std::string upstream_output;

  friend bool operator==(const Generator&, const Generator&) = default;
};

struct InjectionTemplate {
  std::string node;
  ThingTemplate thing;

  friend bool operator==(const InjectionTemplate&, const InjectionTemplate&) = default;
};

/// A check on one simulated case. Oracle expressions only see the input
/// binding and the model's declared store contents.
struct Assertion {
  enum class Kind {
    fires,       // expect fires T [with Type.attr = e, ...]
    never,       // expect never T
    count,       // expect count T <= e
    store_size,  // expect store S size = e
    store_only,  // expect store S only Type(attr = e, ...)
  };

  Kind kind = Kind::fires;
  std::optional<Guard> when;
  /// node id or event name
  std::string target;
  std::string with_type;
  std::vector<std::pair<std::string, Expr>> with;
  Expr bound;
  std::string store;
  std::optional<ThingTemplate> only;

  friend bool operator==(const Assertion&, const Assertion&) = default;
};

std::string to_string(const Assertion& a);

/// Collects produced values for downstream scenarios:
/// `output price = price_take Price.value`
struct OutputSpec {
  std::string name;
  std::string node;
  std::string type;
  std::string attr;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct Scenario {
  std::string name;
  /// super-event the scenario exercises
  std::string target;
  std::size_t max_steps = 10000;
  std::vector<Generator> generators;
  std::vector<InjectionTemplate> injections;
  std::vector<Assertion> assertions;
  std::vector<OutputSpec> outputs;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace tmkit
