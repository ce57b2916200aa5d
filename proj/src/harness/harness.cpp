#include "tmkit/harness/harness.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tmkit {

namespace {

constexpr std::size_t kExcerptLimit = 60;

struct Checker {
  const StaticModel& model;
  const BehavioralModel& behavior;
  const Scenario& scenario;

  // Nodes a target names: the node itself, or the region of the event.
  [[nodiscard]] std::set<std::string> nodes_of(const std::string& target) const {
    if (model.node(target)) return {target};
    if (const auto* e = behavior.event(target)) return {e->region.begin(), e->region.end()};
    return {};
  }

  [[nodiscard]] std::vector<const Firing*> firings_of(const Trace& trace, const std::string& target) const {
    const auto nodes = nodes_of(target);
    std::vector<const Firing*> out;
    for (const auto& f : trace.firings) {
      if (nodes.count(f.node)) out.push_back(&f);
    }
    return out;
  }
};

std::string value_list(const std::vector<Value>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + to_string(values[i]);
  return out + "]";
}

std::string things_text(const std::vector<ThingInstance>& things) {
  if (things.empty()) return "nothing";
  std::string out;
  for (std::size_t i = 0; i < things.size(); ++i) out += (i ? ", " : "") + to_string(things[i]);
  return out;
}

// Returns an empty optional when the assertion holds.
struct Verdict {
  std::string expected;
  std::string observed;
};

std::int64_t as_int(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw EvalError("bound is text");
}

std::optional<Verdict> check(const Assertion& a, const Checker& c, const Binding& binding, const SimResult& run) {
  const auto env = oracle_env(binding, c.model);
  if (a.when && !evaluate(*a.when, env)) return std::nullopt;
  switch (a.kind) {
    case Assertion::Kind::fires: {
      const auto hits = c.firings_of(run.trace, a.target);
      if (a.with.empty()) {
        if (!hits.empty()) return std::nullopt;
        return Verdict{a.target + " fires", a.target + " never fired"};
      }
      ThingInstance want{a.with_type, {}};
      for (const auto& [attr, e] : a.with) want.attrs[attr] = evaluate(e, env);
      std::vector<ThingInstance> seen;
      for (const auto* f : hits) {
        for (const auto& t : f->produced) {
          if (t.thing.type != a.with_type) continue;
          seen.push_back(t.thing);
          const bool match = std::all_of(want.attrs.begin(), want.attrs.end(), [&](const auto& kv) {
            const auto it = t.thing.attrs.find(kv.first);
            return it != t.thing.attrs.end() && it->second == kv.second;
          });
          if (match) return std::nullopt;
        }
      }
      std::string observed = hits.empty() ? a.target + " never fired" : a.target + " produced " + things_text(seen);
      return Verdict{a.target + " produces " + to_string(want), observed};
    }
    case Assertion::Kind::never: {
      const auto hits = c.firings_of(run.trace, a.target);
      if (hits.empty()) return std::nullopt;
      return Verdict{a.target + " never fires",
                     a.target + " fired at step " + std::to_string(hits.front()->step) + " (" + hits.front()->node + ")"};
    }
    case Assertion::Kind::count: {
      const auto bound = as_int(evaluate(a.bound, env));
      const auto n = static_cast<std::int64_t>(c.firings_of(run.trace, a.target).size());
      if (n <= bound) return std::nullopt;
      return Verdict{"at most " + std::to_string(bound) + " firings of " + a.target, std::to_string(n) + " firings"};
    }
    case Assertion::Kind::store_size: {
      const auto want = as_int(evaluate(a.bound, env));
      const auto it = run.stores.find(a.store);
      const auto have = it == run.stores.end() ? 0 : static_cast<std::int64_t>(it->second.size());
      if (have == want) return std::nullopt;
      return Verdict{a.store + " holds " + std::to_string(want) + " things", a.store + " holds " + std::to_string(have)};
    }
    case Assertion::Kind::store_only: {
      const auto want = instantiate(*a.only, binding, c.model);
      const auto it = run.stores.find(a.store);
      if (it == run.stores.end()) return Verdict{"store " + a.store, "no such store"};
      for (const auto& item : it->second) {
        bool ok = item.type == want.type;
        for (const auto& [k, v] : want.attrs) {
          const auto f = item.attrs.find(k);
          ok = ok && f != item.attrs.end() && f->second == v;
        }
        if (!ok) return Verdict{a.store + " holds only " + to_string(want), a.store + " holds " + to_string(item)};
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<Firing> excerpt(const Trace& trace, const std::set<std::string>& nodes) {
  std::vector<Firing> out;
  for (const auto& f : trace.firings) {
    if (!nodes.count(f.node)) continue;
    if (out.size() == kExcerptLimit) break;
    out.push_back(f);
  }
  return out;
}

}  // namespace

Expected<ValidationReport, std::string> run_scenario(const StaticModel& model, const BehavioralModel& behavior,
                                                     const Carving& carving, const Scenario& scenario,
                                                     const UpstreamValues& upstream) {
  const auto start = std::chrono::steady_clock::now();
  ValidationReport report;
  report.scenario = scenario.name;
  report.target = scenario.target;

  std::set<std::string> target_nodes;
  if (!scenario.target.empty()) {
    const auto it = std::find_if(carving.super_events.begin(), carving.super_events.end(),
                                 [&](const SuperEvent& s) { return s.name == scenario.target; });
    if (it == carving.super_events.end()) {
      return unexpected("scenario '" + scenario.name + "' targets unknown super-event '" + scenario.target + "'");
    }
    for (const auto& ev : it->members) {
      if (const auto* e = behavior.event(ev)) target_nodes.insert(e->region.begin(), e->region.end());
    }
  }

  for (const auto& g : scenario.generators) {
    if (g.kind != Generator::Kind::upstream) continue;
    const auto key = g.upstream_scenario + "." + g.upstream_output;
    const auto it = upstream.find(key);
    if (it != upstream.end() && it->second.empty()) report.notices.push_back("upstream output '" + key + "' is empty");
  }

  auto bindings = enumerate_inputs(scenario.generators, model, upstream);
  if (!bindings) return unexpected("scenario '" + scenario.name + "': " + bindings.error());

  const Checker checker{model, behavior, scenario};
  std::map<std::string, std::set<Value>> outputs;
  for (const auto& o : scenario.outputs) outputs[o.name];

  for (const auto& binding : *bindings) {
    ++report.cases_total;
    std::vector<Injection> injections;
    try {
      for (const auto& inj : scenario.injections) injections.push_back({inj.node, instantiate(inj.thing, binding, model)});
    } catch (const EvalError& e) {
      report.failures.push_back({binding, "inject", "injections built", e.what(), {}});
      continue;
    }
    const auto run = simulate(model, injections, scenario.max_steps);
    for (const auto& o : scenario.outputs) {
      for (const auto& f : run.trace.firings) {
        if (f.node != o.node) continue;
        for (const auto& t : f.produced) {
          if (t.thing.type != o.type) continue;
          const auto v = t.thing.attrs.find(o.attr);
          if (v != t.thing.attrs.end()) outputs[o.name].insert(v->second);
        }
      }
    }
    if (!run.ok()) {
      report.failures.push_back({binding, "run", "quiescent run", run.message, excerpt(run.trace, target_nodes)});
      continue;
    }
    bool ok = true;
    for (const auto& a : scenario.assertions) {
      std::optional<Verdict> v;
      try {
        v = check(a, checker, binding, run);
      } catch (const EvalError& e) {
        v = Verdict{"oracle evaluates", e.what()};
      }
      if (v) {
        report.failures.push_back({binding, to_string(a), v->expected, v->observed, excerpt(run.trace, target_nodes)});
        ok = false;
        break;
      }
    }
    if (ok) ++report.cases_passed;
  }

  if (report.cases_total == 0) report.notices.push_back("scenario '" + scenario.name + "' has no cases");
  for (auto& [name, values] : outputs) report.outputs[name].assign(values.begin(), values.end());
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Expected<ValidationReport, std::string> chain_scenarios(const std::vector<ValidationReport>& upstream,
                                                        const StaticModel& model, const BehavioralModel& behavior,
                                                        const Carving& carving, const Scenario& downstream) {
  UpstreamValues values;
  for (const auto& r : upstream) {
    for (const auto& [name, vs] : r.outputs) values[r.scenario + "." + name] = vs;
  }
  return run_scenario(model, behavior, carving, downstream, values);
}

Expected<std::vector<ValidationReport>, std::string> run_scenarios(const StaticModel& model,
                                                                   const BehavioralModel& behavior,
                                                                   const Carving& carving,
                                                                   const std::vector<Scenario>& scenarios) {
  std::vector<ValidationReport> done;
  std::set<std::string> finished;
  std::vector<bool> ran(scenarios.size(), false);
  while (finished.size() < scenarios.size()) {
    bool progress = false;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      if (ran[i]) continue;
      const auto& s = scenarios[i];
      const bool ready = std::all_of(s.generators.begin(), s.generators.end(), [&](const Generator& g) {
        return g.kind != Generator::Kind::upstream || finished.count(g.upstream_scenario);
      });
      if (!ready) continue;
      auto r = chain_scenarios(done, model, behavior, carving, s);
      if (!r) return unexpected(r.error());
      done.push_back(std::move(*r));
      finished.insert(s.name);
      ran[i] = true;
      progress = true;
      break;
    }
    if (!progress) return unexpected(std::string("scenarios draw on unknown or circular upstream outputs"));
  }
  return done;
}

namespace {

nlohmann::json value_json(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

}  // namespace

std::string report_json(const std::vector<ValidationReport>& reports) {
  nlohmann::json all = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["scenario"] = r.scenario;
    j["target"] = r.target;
    j["cases_total"] = r.cases_total;
    j["cases_passed"] = r.cases_passed;
    j["notices"] = r.notices;
    j["outputs"] = nlohmann::json::object();
    for (const auto& [name, vs] : r.outputs) {
      auto& arr = j["outputs"][name] = nlohmann::json::array();
      for (const auto& v : vs) arr.push_back(value_json(v));
    }
    j["failures"] = nlohmann::json::array();
    for (const auto& f : r.failures) {
      nlohmann::json trace = nlohmann::json::array();
      std::istringstream lines(to_jsonl(Trace{f.excerpt}));
      for (std::string line; std::getline(lines, line);) trace.push_back(nlohmann::json::parse(line));
      j["failures"].push_back({{"inputs", to_string(f.inputs)},
                               {"assertion", f.assertion},
                               {"expected", f.expected},
                               {"observed", f.observed},
                               {"trace", trace}});
    }
    all.push_back(std::move(j));
  }
  return all.dump(2) + "\n";
}

std::string report_text(const ValidationReport& r) {
  std::string out = r.scenario + (r.target.empty() ? "" : " [" + r.target + "]") + ": " +
                    std::to_string(r.cases_passed) + "/" + std::to_string(r.cases_total) + " cases passed\n";
  for (const auto& n : r.notices) out += "  notice: " + n + "\n";
  for (const auto& f : r.failures) {
    out += "  FAIL " + to_string(f.inputs) + "\n    " + f.assertion + "\n    expected: " + f.expected +
           "\n    observed: " + f.observed + "\n";
  }
  for (const auto& [name, vs] : r.outputs) out += "  output " + name + " = " + value_list(vs) + "\n";
  return out;
}

}  // namespace tmkit
