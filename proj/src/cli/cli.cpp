#include "tmkit/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tmkit/carve/carve.hpp"
#include "tmkit/core/dot.hpp"
#include "tmkit/dsl/dsl.hpp"
#include "tmkit/fixtures/fixtures.hpp"
#include "tmkit/harness/harness.hpp"
#include "tmkit/harness/oracle.hpp"
#include "tmkit/sim/conformance.hpp"
#include "tmkit/sim/sim.hpp"

namespace tmkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Failure with an exit status, carried up to run_cli.
struct CliError {
  int status;
  std::string message;
};

[[noreturn]] void fail(int status, std::string message) { throw CliError{status, std::move(message)}; }

std::string read_or_fail(const fs::path& path) {
  auto text = read_file(path);
  if (!text) fail(exit_usage, text.error());
  return *text;
}

[[noreturn]] void fail_parse(const ParseErrors& errors, std::ostream& err) {
  for (const auto& e : errors) err << to_string(e) << "\n";
  fail(exit_failed, {});
}

// Everything a command may need. Parts are loaded on demand.
class Project {
 public:
  Project(const CliConfig& config, std::ostream& err) : config_(config), err_(err) {
    const auto& in = config.input;
    if (in.empty()) fail(exit_usage, "no input given");
    if (!fs::exists(in) && !in.empty() && in.find('/') == std::string::npos && in.find('.') == std::string::npos) {
      fixture_name_ = in;
      root_ = fixture_root();
    } else if (fs::is_directory(in)) {
      const fs::path p = fs::absolute(in).lexically_normal();
      fixture_name_ = (p.has_filename() ? p : p.parent_path()).filename().string();
      root_ = (p.has_filename() ? p : p.parent_path()).parent_path();
    } else {
      model_path_ = in;
    }
  }

  const StaticModel& model() {
    if (fixture_name_) return fixture().model;
    if (!model_) {
      if (!fs::exists(model_path_)) fail(exit_usage, "cannot read " + model_path_);
      const auto text = read_or_fail(model_path_);
      auto m = parse_model(text, model_path_);
      if (!m) fail_parse(m.error(), err_);
      model_ = std::make_unique<StaticModel>(std::move(*m));
    }
    return *model_;
  }

  const EventsModel& events() {
    if (!config_.events_path.empty()) {
      if (!events_) {
        auto ev = parse_events(read_or_fail(config_.events_path), model(), config_.events_path);
        if (!ev) fail_parse(ev.error(), err_);
        events_ = std::make_unique<EventsModel>(std::move(*ev));
      }
      return *events_;
    }
    if (!fixture_name_) fail(exit_usage, "no events: pass --events FILE or a fixture");
    return fixture().events;
  }

  const BehavioralModel& behavior() {
    if (!behavior_) behavior_ = std::make_unique<BehavioralModel>(build_behavior(events()));
    return *behavior_;
  }

  /// The manual carving from --groups or the fixture.
  const Carving& carving() {
    if (!carving_) {
      if (!config_.groups_path.empty()) {
        auto groups = parse_groups(read_or_fail(config_.groups_path), config_.groups_path);
        if (!groups) fail_parse(groups.error(), err_);
        auto c = carve_manual(behavior(), *groups);
        if (!c) {
          auto diags = c.error();
          for (auto& d : diags) {
            if (d.span.line == 0) d.span.file = config_.groups_path;
            err_ << to_string(d) << "\n";
          }
          fail(exit_failed, {});
        }
        carving_ = std::make_unique<Carving>(std::move(*c));
      } else if (fixture_name_ && config_.events_path.empty()) {
        carving_ = std::make_unique<Carving>(fixture().carving);
      } else {
        fail(exit_usage, "no grouping: pass --groups FILE, --auto, or a fixture");
      }
    }
    return *carving_;
  }

  std::vector<Scenario> scenarios() {
    if (config_.scenario_paths.empty()) {
      if (!fixture_name_) fail(exit_usage, "no scenarios: pass --scenarios FILE or a fixture");
      return fixture().scenarios;
    }
    std::vector<Scenario> out;
    for (const auto& p : config_.scenario_paths) {
      auto s = parse_scenarios(read_or_fail(p), p);
      if (!s) fail_parse(s.error(), err_);
      out.insert(out.end(), s->begin(), s->end());
    }
    return out;
  }

 private:
  const Fixture& fixture() {
    if (!fixture_) {
      if (!fs::is_directory(root_ / *fixture_name_)) fail(exit_usage, "unknown fixture '" + *fixture_name_ + "'");
      auto f = load_fixture(*fixture_name_, root_);
      if (!f) fail(exit_failed, f.error());
      fixture_ = *f;
    }
    return *fixture_;
  }

  const CliConfig& config_;
  std::ostream& err_;
  std::optional<std::string> fixture_name_;
  fs::path root_;
  std::string model_path_;
  FixturePtr fixture_;
  std::unique_ptr<StaticModel> model_;
  std::unique_ptr<EventsModel> events_;
  std::unique_ptr<BehavioralModel> behavior_;
  std::unique_ptr<Carving> carving_;
};

void emit(const CliConfig& config, std::ostream& out, const std::string& text) {
  if (config.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(config.out_path, std::ios::binary);
  if (!f) fail(exit_usage, "cannot write " + config.out_path);
  f << text;
}

json value_json(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

json thing_json(const ThingInstance& t) {
  json attrs = json::object();
  for (const auto& [k, v] : t.attrs) attrs[k] = value_json(v);
  return {{"type", t.type}, {"attrs", attrs}};
}

json model_json(const StaticModel& m) {
  json j;
  j["name"] = m.name();
  j["things"] = json::array();
  for (const auto& t : m.things()) {
    json attrs = json::array();
    for (const auto& a : t.attrs) attrs.push_back({{"name", a.name}, {"type", to_string(a.type)}});
    j["things"].push_back({{"name", t.name}, {"attrs", attrs}});
  }
  j["thimacs"] = json::array();
  for (const auto& t : m.thimacs()) {
    json contents = json::array();
    for (const auto& item : t.store_contents) contents.push_back(thing_json(item));
    j["thimacs"].push_back({{"name", t.name},
                            {"parent", t.parent ? json(*t.parent) : json(nullptr)},
                            {"store", t.is_store},
                            {"contents", contents}});
  }
  j["nodes"] = json::array();
  for (const auto& n : m.nodes()) {
    json effect = json::array();
    for (const auto& s : n.effect) effect.push_back(to_string(s));
    j["nodes"].push_back({{"id", n.id},
                          {"kind", to_string(n.kind)},
                          {"thing", n.thing},
                          {"thimac", n.thimac},
                          {"input", n.input},
                          {"effect", effect}});
  }
  j["flows"] = json::array();
  for (const auto& f : m.flows()) j["flows"].push_back({{"from", f.from}, {"to", f.to}});
  j["triggers"] = json::array();
  for (const auto& t : m.triggers()) {
    json tj{{"from", t.from}, {"to", t.to}};
    if (t.guard) tj["guard"] = to_string(*t.guard);
    if (t.otherwise) tj["else"] = true;
    j["triggers"].push_back(tj);
  }
  return j;
}

json edges_json(const std::vector<PrecedenceEdge>& edges) {
  json out = json::array();
  for (const auto& e : edges) {
    out.push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}, {"via", e.via}});
  }
  return out;
}

json behavior_json(const BehavioralModel& b) {
  json events = json::array();
  for (const auto& e : b.events) {
    json ej{{"name", e.name}, {"description", e.description}, {"region", e.region}};
    if (e.time) ej["time"] = *e.time;
    events.push_back(ej);
  }
  return {{"name", b.name}, {"events", events}, {"edges", edges_json(b.edges)}};
}

json carving_json(const Carving& c) {
  json parts = json::array();
  for (const auto& s : c.super_events) parts.push_back({{"name", s.name}, {"members", s.members}});
  return {{"name", c.name}, {"super_events", parts}, {"joints", edges_json(c.joints)}, {"notices", c.notices}};
}

std::string render(const CliConfig& config, const json& j, const std::string& dot) {
  return config.format == "json" ? j.dump(2) + "\n" : dot;
}

// `DRINK+AMOUNT`: select a drink and pay AMOUNT in the fewest coins.
std::optional<std::vector<Injection>> purchase(const StaticModel& model, const std::string& spec) {
  const auto plus = spec.find('+');
  if (plus == std::string::npos || plus == 0 || plus + 1 == spec.size()) return std::nullopt;
  const auto drink = spec.substr(0, plus);
  const auto amount_text = spec.substr(plus + 1);
  if (!std::all_of(amount_text.begin(), amount_text.end(), ::isdigit)) return std::nullopt;
  if (!model.node("sel_new") || !model.node("coin_new")) {
    fail(exit_usage, "purchase shorthand '" + spec + "' needs the vending model");
  }
  std::int64_t amount = std::stoll(amount_text);
  if (amount % 25 != 0) fail(exit_usage, "amount " + amount_text + " is not payable in 25/50/100 coins");
  const std::int64_t n100 = amount / 100;
  amount %= 100;
  const std::int64_t n50 = amount / 50;
  const std::int64_t n25 = (amount % 50) / 25;
  return std::vector<Injection>{
      {"sel_new", {"DrinkSelection", {{"name", drink}}}},
      {"coin_new", {"Coins", {{"n25", n25}, {"n50", n50}, {"n100", n100}}}}};
}

std::vector<Injection> parse_injection_lines(const StaticModel& model, const std::string& text,
                                             const std::string& where) {
  std::string doc = "scenario cli\n";
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    doc += "inject " + line + "\n";
  }
  auto scenarios = parse_scenarios(doc, where);
  if (!scenarios) {
    std::string message = "bad injection";
    for (const auto& e : scenarios.error()) message += "\n" + e.message;
    fail(exit_usage, message);
  }
  std::vector<Injection> out;
  for (const auto& inj : scenarios->front().injections) {
    try {
      out.push_back({inj.node, instantiate(inj.thing, Binding{}, model)});
    } catch (const EvalError& e) {
      fail(exit_usage, "injection at " + inj.node + ": " + e.what());
    }
  }
  return out;
}

std::vector<Injection> injections(const StaticModel& model, const std::vector<std::string>& specs) {
  std::vector<Injection> out;
  for (const auto& spec : specs) {
    if (auto p = purchase(model, spec)) {
      out.insert(out.end(), p->begin(), p->end());
    } else if (!spec.empty() && spec.front() == '@') {
      auto more = parse_injection_lines(model, read_or_fail(spec.substr(1)), spec.substr(1));
      out.insert(out.end(), more.begin(), more.end());
    } else {
      auto more = parse_injection_lines(model, spec, "--inject");
      out.insert(out.end(), more.begin(), more.end());
    }
  }
  return out;
}

int cmd_check(const CliConfig& config, Project& project, std::ostream& out, std::ostream& err) {
  const auto& model = project.model();
  auto diags = check_static(model);
  if (!config.input.empty() && fs::is_regular_file(config.input)) {
    SourceMap map(config.input);
    (void)parse_model_decl(read_or_fail(config.input), config.input, &map);
    map.locate(diags);
  }
  for (const auto& d : diags) err << to_string(d) << "\n";
  if (!diags.empty()) return exit_failed;
  out << "ok: " << model.nodes().size() << " nodes, " << model.flows().size() << " flows, "
      << model.triggers().size() << " triggers\n";
  return exit_ok;
}

int cmd_events(const CliConfig& config, Project& project, std::ostream& out, std::ostream& err) {
  const auto& events = project.events();
  const auto diags = validate_events(events);
  for (const auto& d : diags) err << to_string(d) << "\n";
  if (!diags.empty()) return exit_failed;
  if (config.format == "json") {
    emit(config, out, behavior_json(project.behavior())["events"].dump(2) + "\n");
    return exit_ok;
  }
  std::string text;
  for (const auto& e : events.events()) {
    text += e.name + "  " + e.description + "\n    nodes: ";
    for (std::size_t i = 0; i < e.region.size(); ++i) text += (i ? ", " : "") + e.region[i];
    text += "\n";
  }
  emit(config, out, text);
  return exit_ok;
}

int cmd_behavior(const CliConfig& config, Project& project, std::ostream& out) {
  const auto& b = project.behavior();
  emit(config, out, render(config, behavior_json(b), export_dot(b)));
  return exit_ok;
}

int cmd_carve(const CliConfig& config, Project& project, std::ostream& out, std::ostream& err) {
  Carving c;
  if (config.auto_carve) {
    c = carve_auto(project.behavior(), config.max_parts);
  } else {
    c = project.carving();
  }
  for (const auto& n : c.notices) err << "notice: " << n << "\n";
  emit(config, out, render(config, carving_json(c), export_dot(c)));
  return exit_ok;
}

int cmd_simulate(const CliConfig& config, Project& project, std::ostream& out, std::ostream& err) {
  const auto& model = project.model();
  const auto inj = injections(model, config.injections);
  const auto result = simulate(model, inj, config.max_steps);
  if (result.outcome == SimOutcome::bad_injection) fail(exit_usage, result.message);
  emit(config, out, to_jsonl(result.trace));
  err << "outcome: " << to_string(result.outcome) << ", " << result.trace.firings.size() << " firings";
  if (!result.message.empty()) err << " (" << result.message << ")";
  err << "\n";
  return result.ok() ? exit_ok : exit_failed;
}

int cmd_conforms(const CliConfig& config, Project& project, std::ostream& out) {
  if (config.trace_path.empty()) fail(exit_usage, "conforms needs --trace FILE");
  auto trace = trace_from_jsonl(read_or_fail(config.trace_path));
  if (!trace) fail(exit_usage, config.trace_path + ": " + trace.error());
  auto report = conforms(*trace, project.behavior());
  if (!report) fail(exit_failed, report.error());
  std::string text;
  if (config.format == "json") {
    json v = json::array();
    for (const auto& x : report->violations) {
      v.push_back({{"step", x.step}, {"node", x.node}, {"event", x.event}, {"message", x.message}});
    }
    text = json{{"conformant", report->conformant}, {"events", report->event_sequence}, {"violations", v}}.dump(2) +
           "\n";
  } else {
    text = report->conformant ? "conformant\n" : "not conformant\n";
    text += "events:";
    for (const auto& e : report->event_sequence) text += " " + e;
    text += "\n";
    for (const auto& v : report->violations) {
      text += "step " + std::to_string(v.step) + " " + v.node + " (" + v.event + "): " + v.message + "\n";
    }
  }
  emit(config, out, text);
  return report->conformant ? exit_ok : exit_failed;
}

int cmd_validate(const CliConfig& config, Project& project, std::ostream& out) {
  const auto scenarios = project.scenarios();
  auto reports = run_scenarios(project.model(), project.behavior(), project.carving(), scenarios);
  if (!reports) fail(exit_failed, reports.error());
  bool all = true;
  for (const auto& r : *reports) {
    out << "scenario " << r.scenario << ": " << r.cases_passed << "/" << r.cases_total << " passed\n";
    for (const auto& n : r.notices) out << "  notice: " << n << "\n";
    if (config.verbosity > 0) {
      for (const auto& f : r.failures) {
        out << "  FAIL " << to_string(f.inputs) << ": " << f.assertion << "\n    expected: " << f.expected
            << "\n    observed: " << f.observed << "\n";
      }
    }
    all = all && r.passed();
  }
  if (!config.report_path.empty()) {
    std::ofstream f(config.report_path, std::ios::binary);
    if (!f) fail(exit_usage, "cannot write " + config.report_path);
    f << report_json(*reports);
  }
  return all ? exit_ok : exit_failed;
}

int cmd_export(const CliConfig& config, Project& project, std::ostream& out) {
  const auto& model = project.model();
  emit(config, out, render(config, model_json(model), export_dot(model)));
  return exit_ok;
}

}  // namespace

int run_cli(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.max_steps < 1) fail(exit_usage, "--max-steps must be at least 1");
    if (config.format != "dot" && config.format != "json") fail(exit_usage, "--format must be dot or json");
    Project project(config, err);
    const auto& c = config.command;
    if (c == "check") return cmd_check(config, project, out, err);
    if (c == "events") return cmd_events(config, project, out, err);
    if (c == "behavior") return cmd_behavior(config, project, out);
    if (c == "carve") return cmd_carve(config, project, out, err);
    if (c == "simulate") return cmd_simulate(config, project, out, err);
    if (c == "conforms") return cmd_conforms(config, project, out);
    if (c == "validate") return cmd_validate(config, project, out);
    if (c == "export") return cmd_export(config, project, out);
    fail(exit_usage, "unknown command '" + c + "'");
  } catch (const CliError& e) {
    if (!e.message.empty()) err << "error: " << e.message << "\n";
    return e.status;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thinging machine model toolkit", "tmkit"};
  app.require_subcommand(1);
  CliConfig config;

  auto input = [&](CLI::App* sub) {
    sub->add_option("input", config.input, "fixture name, fixture directory, or .tm file")->required();
  };
  auto with_events = [&](CLI::App* sub) { sub->add_option("--events", config.events_path, ".ev file"); };
  auto with_groups = [&](CLI::App* sub) { sub->add_option("--groups", config.groups_path, ".grp file"); };
  auto with_out = [&](CLI::App* sub) { sub->add_option("--out", config.out_path, "write output here"); };
  auto with_format = [&](CLI::App* sub) {
    sub->add_option("--format", config.format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  };

  auto* check = app.add_subcommand("check", "parse a model and check its flows and triggers");
  input(check);

  auto* events = app.add_subcommand("events", "validate and list events");
  input(events);
  with_events(events);
  with_out(events);
  with_format(events);

  auto* behavior = app.add_subcommand("behavior", "build the behavioral model");
  input(behavior);
  with_events(behavior);
  with_out(behavior);
  with_format(behavior);

  auto* carve = app.add_subcommand("carve", "group events into super-events");
  input(carve);
  with_events(carve);
  with_groups(carve);
  with_out(carve);
  with_format(carve);
  carve->add_flag("--auto", config.auto_carve, "cut at legal joints automatically");
  carve->add_option("--max-parts", config.max_parts, "merge down to at most N super-events");

  auto* simulate = app.add_subcommand("simulate", "run the model and print the trace as JSON lines");
  input(simulate);
  simulate->add_option("--inject", config.injections,
                       "NODE Type(attr = value, ...), @FILE, or DRINK+AMOUNT for the vending model");
  simulate->add_option("--max-steps", config.max_steps, "step budget")->check(CLI::PositiveNumber);
  with_out(simulate);

  auto* conf = app.add_subcommand("conforms", "check a trace against the behavioral model");
  input(conf);
  with_events(conf);
  conf->add_option("--trace", config.trace_path, "JSON-lines trace")->required();
  with_out(conf);
  conf->add_option("--format", config.format, "dot (text) or json")->check(CLI::IsMember({"dot", "json"}));

  auto* validate = app.add_subcommand("validate", "run scenarios and report pass/fail");
  input(validate);
  with_events(validate);
  with_groups(validate);
  validate->add_option("--scenarios", config.scenario_paths, ".sc files");
  validate->add_option("--report", config.report_path, "write the JSON report here");
  validate->add_flag("-v,--verbose", config.verbosity, "list failing cases");

  auto* exp = app.add_subcommand("export", "export the static model");
  input(exp);
  with_out(exp);
  with_format(exp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  for (auto* sub : app.get_subcommands()) config.command = sub->get_name();
  return run_cli(config, out, err);
}

}  // namespace tmkit
