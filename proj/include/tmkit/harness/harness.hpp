#pragma once

#include <map>
#include <string>
#include <vector>

#include "tmkit/carve/carve.hpp"
#include "tmkit/core/expected.hpp"
#include "tmkit/events/events.hpp"
#include "tmkit/harness/oracle.hpp"
#include "tmkit/harness/scenario.hpp"
#include "tmkit/sim/sim.hpp"

namespace tmkit {

struct CaseFailure {
  Binding inputs;
  /// the assertion as written, or what went wrong before assertions ran
  std::string assertion;
  std::string expected;
  std::string observed;
  /// firings of the target super-event's nodes only
  std::vector<Firing> excerpt;
};

struct ValidationReport {
  std::string scenario;
  std::string target;
  std::size_t cases_total = 0;
  std::size_t cases_passed = 0;
  std::vector<CaseFailure> failures;
  /// distinct values per declared output, ascending
  std::map<std::string, std::vector<Value>> outputs;
  std::vector<std::string> notices;
  double wall_ms = 0;

  [[nodiscard]] bool passed() const { return cases_passed == cases_total; }
};

/// Simulates every binding of the scenario's generators and checks each
/// assertion against values the oracle computes from the binding alone.
/// Errors: unknown target super-event, generator errors.
Expected<ValidationReport, std::string> run_scenario(const StaticModel& model, const BehavioralModel& behavior,
                                                     const Carving& carving, const Scenario& scenario,
                                                     const UpstreamValues& upstream = {});

/// Runs `downstream` on the value sets the upstream reports produced.
Expected<ValidationReport, std::string> chain_scenarios(const std::vector<ValidationReport>& upstream,
                                                        const StaticModel& model, const BehavioralModel& behavior,
                                                        const Carving& carving, const Scenario& downstream);

/// Runs scenarios so that each runs after the ones it draws values from,
/// otherwise in the given order.
Expected<std::vector<ValidationReport>, std::string> run_scenarios(const StaticModel& model,
                                                                   const BehavioralModel& behavior,
                                                                   const Carving& carving,
                                                                   const std::vector<Scenario>& scenarios);

/// JSON with sorted keys. Wall time is left out so reruns are byte-equal.
std::string report_json(const std::vector<ValidationReport>& reports);
std::string report_text(const ValidationReport& report);

}  // namespace tmkit
